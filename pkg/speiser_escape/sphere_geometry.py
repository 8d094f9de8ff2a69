"""
Sphere Geometry
===============
Chordal metric, spherical area and density, logarithmic area and the integral
test for conformality at infinity, all by midpoint quadrature on uniform grids.

Points of the Riemann sphere are plain ``complex`` values; the point at infinity is
``INFINITY`` (``complex(inf, 0)``). Every non-finite value is normalized to it, so
no NaN ever leaves this package.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np

from speiser_escape.config import settings
from speiser_escape.parallel import map_row_blocks

logger = logging.getLogger(__name__)

INFINITY = complex(math.inf, 0.0)

# Values beyond this modulus are treated as the point at infinity.
HUGE_VALUE = 1e15

Predicate = Callable[[np.ndarray], np.ndarray]
ArrayLike = Union[complex, np.ndarray]


def is_infinite(z: ArrayLike) -> Union[bool, np.ndarray]:
    """True where ``z`` is the point at infinity (any non-finite coordinate)."""
    result = ~np.isfinite(np.asarray(z, dtype=complex))
    return bool(result) if np.ndim(result) == 0 else result


def normalize_extended(values: ArrayLike, huge: float = HUGE_VALUE) -> np.ndarray:
    """Map non-finite entries and entries with modulus above ``huge`` to INFINITY."""
    out = np.array(values, dtype=complex, copy=True)
    with np.errstate(invalid="ignore", over="ignore"):
        bad = ~np.isfinite(out) | (np.abs(out) > huge)
    out[bad] = INFINITY
    return out


def chordal_distance(z: ArrayLike, w: ArrayLike) -> Union[float, np.ndarray]:
    """
    Chordal distance on the sphere of radius 1.

    Args:
        z: Point or array of points (INFINITY allowed)
        w: Point or array of points (INFINITY allowed)

    Returns:
        2|z-w| / sqrt((1+|z|^2)(1+|w|^2)), with the limiting values at infinity
    """
    za = np.asarray(z, dtype=complex)
    wa = np.asarray(w, dtype=complex)
    z_inf = ~np.isfinite(za)
    w_inf = ~np.isfinite(wa)
    zf = np.where(z_inf, 0.0, za)
    wf = np.where(w_inf, 0.0, wa)
    rz = np.hypot(1.0, np.abs(zf))
    rw = np.hypot(1.0, np.abs(wf))

    finite = 2.0 * np.abs(zf - wf) / (rz * rw)
    result = np.where(z_inf & ~w_inf, 2.0 / rw, finite)
    result = np.where(w_inf & ~z_inf, 2.0 / rz, result)
    result = np.where(z_inf & w_inf, 0.0, result)
    return float(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class PlanarRegion:
    """
    Axis-aligned rectangle with an optional membership predicate.

    The predicate receives an array of complex grid points and returns a boolean
    mask. Grid points are cell midpoints; row 0 is the top row (largest y).
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    predicate: Optional[Predicate] = None
    resolution: Union[int, Tuple[int, int]] = field(
        default_factory=lambda: settings.grid_resolution
    )

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"Degenerate rectangle [{self.x_min}, {self.x_max}] x [{self.y_min}, {self.y_max}]"
            )
        nx, ny = self.shape[1], self.shape[0]
        if nx < 2 or ny < 2:
            raise ValueError(f"Resolution must be at least 2 per axis, got {nx}x{ny}")

    @property
    def shape(self) -> Tuple[int, int]:
        """Grid shape as (rows, columns)."""
        if isinstance(self.resolution, tuple):
            nx, ny = self.resolution
        else:
            nx = ny = int(self.resolution)
        return int(ny), int(nx)

    @property
    def spacing(self) -> Tuple[float, float]:
        ny, nx = self.shape
        return (self.x_max - self.x_min) / nx, (self.y_max - self.y_min) / ny

    def grid_rows(self, start: int, stop: int) -> np.ndarray:
        """Cell-center grid for rows ``start`` to ``stop`` (top to bottom)."""
        ny, nx = self.shape
        dx, dy = self.spacing
        xs = self.x_min + (np.arange(nx) + 0.5) * dx
        ys = self.y_max - (np.arange(start, stop) + 0.5) * dy
        return xs[np.newaxis, :] + 1j * ys[:, np.newaxis]

    def grid(self) -> np.ndarray:
        return self.grid_rows(0, self.shape[0])

    def contains(self, z: np.ndarray) -> np.ndarray:
        """Membership mask for arbitrary points."""
        z = np.asarray(z, dtype=complex)
        inside = (
            (z.real >= self.x_min)
            & (z.real <= self.x_max)
            & (z.imag >= self.y_min)
            & (z.imag <= self.y_max)
        )
        if self.predicate is not None:
            inside &= np.asarray(self.predicate(z), dtype=bool)
        return inside

    def with_predicate(self, predicate: Predicate) -> "PlanarRegion":
        """Same rectangle and grid, membership intersected with ``predicate``."""
        base = self.predicate

        def combined(z: np.ndarray) -> np.ndarray:
            mask = np.asarray(predicate(z), dtype=bool)
            if base is not None:
                mask &= np.asarray(base(z), dtype=bool)
            return mask

        return PlanarRegion(
            self.x_min, self.x_max, self.y_min, self.y_max, combined, self.resolution
        )

    @classmethod
    def disk(cls, center: complex, radius: float, resolution=None) -> "PlanarRegion":
        return cls(
            center.real - radius,
            center.real + radius,
            center.imag - radius,
            center.imag + radius,
            lambda z: np.abs(z - center) < radius,
            resolution or settings.grid_resolution,
        )

    @classmethod
    def annulus(cls, inner: float, outer: float, resolution=None) -> "PlanarRegion":
        return cls(
            -outer,
            outer,
            -outer,
            outer,
            lambda z: (np.abs(z) > inner) & (np.abs(z) < outer),
            resolution or settings.grid_resolution,
        )


@dataclass(frozen=True)
class LogAreaEstimate:
    """Logarithmic area estimate; ``finite`` is False once the divergence cap is hit."""

    value: float
    finite: bool


@dataclass(frozen=True)
class TwbEstimate:
    """Integral test estimate with the dyadic shell contributions (outermost first)."""

    estimate: float
    finite: bool
    shells: Tuple[float, ...]


def _region_sums(
    region: PlanarRegion,
    integrand: Callable[[np.ndarray, np.ndarray], Tuple[float, ...]],
    workers: Optional[int] = None,
) -> Tuple[float, ...]:
    """Sum per-block tuples of partial sums over the region grid in row order."""

    def block(start: int, stop: int) -> Tuple[float, ...]:
        z = region.grid_rows(start, stop)
        return integrand(z, region.contains(z))

    parts = map_row_blocks(block, region.shape[0], workers)
    return tuple(math.fsum(column) for column in zip(*parts))


def _spherical_weight(z: np.ndarray) -> np.ndarray:
    return 4.0 / (1.0 + np.abs(z) ** 2) ** 2


def spherical_area(a: PlanarRegion, workers: Optional[int] = None) -> float:
    """Spherical area of ``a`` with area element 4 dx dy / (1+x^2+y^2)^2."""
    dx, dy = a.spacing
    (total,) = _region_sums(a, lambda z, m: (float(np.sum(_spherical_weight(z[m]))),), workers)
    return total * dx * dy


def spherical_density(a: PlanarRegion, b: PlanarRegion, workers: Optional[int] = None) -> float:
    """
    Spherical density of ``a`` in ``b``, sampled on the grid of ``b``.

    Raises:
        ValueError: If ``b`` has no grid point (zero spherical area)
    """

    def integrand(z: np.ndarray, mask: np.ndarray) -> Tuple[float, float]:
        w = _spherical_weight(z[mask])
        inside = a.contains(z[mask])
        return float(np.sum(w[inside])), float(np.sum(w))

    numerator, denominator = _region_sums(b, integrand, workers)
    if denominator <= 0.0:
        raise ValueError("empty denominator region")
    return numerator / denominator


def euclidean_density(a: PlanarRegion, b: PlanarRegion, workers: Optional[int] = None) -> float:
    """Plain dx dy density of ``a`` in ``b``, sampled on the grid of ``b``."""

    def integrand(z: np.ndarray, mask: np.ndarray) -> Tuple[float, float]:
        return float(np.count_nonzero(a.contains(z[mask]))), float(np.count_nonzero(mask))

    numerator, denominator = _region_sums(b, integrand, workers)
    if denominator <= 0.0:
        raise ValueError("empty denominator region")
    return numerator / denominator


def _touches_origin(region: PlanarRegion) -> bool:
    """True when a member cell of the grid lies within one cell diagonal of 0."""
    if not (region.x_min <= 0.0 <= region.x_max and region.y_min <= 0.0 <= region.y_max):
        return False
    ny, nx = region.shape
    dx, dy = region.spacing
    column = int((0.0 - region.x_min) / dx)
    row = int((region.y_max - 0.0) / dy)
    columns = np.arange(max(column - 1, 0), min(column + 2, nx))
    rows = np.arange(max(row - 1, 0), min(row + 2, ny))
    xs = region.x_min + (columns + 0.5) * dx
    ys = region.y_max - (rows + 0.5) * dy
    near = (xs[np.newaxis, :] + 1j * ys[:, np.newaxis]).ravel()
    near = near[np.abs(near) <= math.hypot(dx, dy)]
    return bool(np.any(region.contains(near)))


def logarea(
    a: PlanarRegion,
    excise_unit_disk: bool = False,
    cap: Optional[float] = None,
    workers: Optional[int] = None,
) -> LogAreaEstimate:
    """
    Logarithmic area, the integral of dx dy / (x^2 + y^2) over ``a``.

    Args:
        a: Region to integrate over
        excise_unit_disk: Remove the closed unit disk from ``a`` first
        cap: Divergence cap (defaults to settings.divergence_cap)
        workers: Thread count

    Returns:
        LogAreaEstimate; ``finite`` is False when the sum exceeds the cap

    Raises:
        ValueError: If the closure of the region reaches the origin and nothing is
            excised
    """
    cap = settings.divergence_cap if cap is None else cap
    if not excise_unit_disk and (bool(a.contains(np.array([0j]))[0]) or _touches_origin(a)):
        raise ValueError("singular integrand at origin")

    region = a.with_predicate(lambda z: np.abs(z) > 1.0) if excise_unit_disk else a
    dx, dy = region.spacing

    def integrand(z: np.ndarray, mask: np.ndarray) -> Tuple[float]:
        zs = z[mask]
        zs = zs[zs != 0]
        return (float(np.sum(1.0 / np.abs(zs) ** 2)),)

    (total,) = _region_sums(region, integrand, workers)
    value = total * dx * dy
    if value > cap:
        logger.debug(f"Logarithmic area exceeded cap {cap:g}")
        return LogAreaEstimate(value=math.inf, finite=False)
    return LogAreaEstimate(value=value, finite=True)


def twb_finiteness(
    dilatation: Callable[[np.ndarray], np.ndarray],
    half_width: float = 64.0,
    resolution: int = 4096,
    decay_ratio: float = 0.75,
    cap: Optional[float] = None,
    workers: Optional[int] = None,
) -> TwbEstimate:
    """
    Integral of (K-1)/(x^2+y^2) over the square [-X, X]^2 minus the unit disk.

    The square is split into dyadic shells by max(|x|, |y|). The integral is
    reported finite when the outermost shell contributes at most ``decay_ratio``
    of the next one, i.e. the tail decays geometrically. Scale-invariant
    integrands (K-1 ~ const) give equal shells and are flagged divergent.

    Args:
        dilatation: Vectorized K(z) >= 1
        half_width: X, half the side of the sampled square
        resolution: Grid points per axis
        decay_ratio: Shell ratio below which the tail counts as decaying
        cap: Divergence cap (defaults to settings.divergence_cap)
        workers: Thread count

    Returns:
        TwbEstimate with the estimate, the finite flag and shell contributions

    Raises:
        ValueError: If K < 1 anywhere on the grid
    """
    cap = settings.divergence_cap if cap is None else cap
    region = PlanarRegion(
        -half_width,
        half_width,
        -half_width,
        half_width,
        lambda z: np.abs(z) > 1.0,
        resolution,
    )
    dx, dy = region.spacing
    edges = (half_width / 2.0, half_width / 4.0, half_width / 8.0)

    def integrand(z: np.ndarray, mask: np.ndarray) -> Tuple[float, ...]:
        zs = z[mask]
        k = np.asarray(dilatation(zs), dtype=float)
        if np.any(k < 1.0 - 1e-12):
            raise ValueError("invalid dilatation")
        values = (k - 1.0) / np.abs(zs) ** 2
        size = np.maximum(np.abs(zs.real), np.abs(zs.imag))
        shells = [
            values[size > edges[0]],
            values[(size <= edges[0]) & (size > edges[1])],
            values[(size <= edges[1]) & (size > edges[2])],
            values[size <= edges[2]],
        ]
        return tuple(float(np.sum(s)) for s in shells)

    sums = _region_sums(region, integrand, workers)
    shells = tuple(s * dx * dy for s in sums)
    estimate = math.fsum(shells)
    if estimate > cap:
        return TwbEstimate(estimate=math.inf, finite=False, shells=shells)
    outer, next_outer = shells[0], shells[1]
    finite = outer <= 1e-15 or outer <= decay_ratio * next_outer
    logger.debug(f"Integral test shells {shells}, finite={finite}")
    return TwbEstimate(estimate=estimate, finite=finite, shells=shells)
