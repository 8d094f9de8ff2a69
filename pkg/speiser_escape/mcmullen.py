"""
Nested Cover Bounds
===================
Lower bounds for the Hausdorff dimension of nested Cantor-type families.

A nested family with density ratios Delta_l and diameters d_l has dimension at
least 2 - limsup sum_{j<=l+1} |log Delta_j| / |log d_l|. The covers coming from
pole neighbourhoods give the bound 2 rho / (1 + rho) as R -> infinity, and 2 for
the exponential model.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.interpolate import BarycentricInterpolator

from speiser_escape.models import ModelFunction
from speiser_escape.orbits import Classification, Schedule, backward_orbit, classify_points
from speiser_escape.parallel import map_row_blocks
from speiser_escape.sphere_geometry import PlanarRegion

logger = logging.getLogger(__name__)

# Smallest level used as an extrapolation node.
MIN_EXTRAPOLATION_LEVEL = 8
EXTRAPOLATION_NODES = 6


@dataclass(frozen=True)
class NestedCoverSpec:
    """
    Density ratios and diameters of a nested family, stored as logarithms.

    Index 0 holds level 1.
    """

    log_deltas: np.ndarray
    log_diams: np.ndarray

    def __post_init__(self):
        log_deltas = np.asarray(self.log_deltas, dtype=float)
        log_diams = np.asarray(self.log_diams, dtype=float)
        object.__setattr__(self, "log_deltas", log_deltas)
        object.__setattr__(self, "log_diams", log_diams)
        if log_deltas.shape != log_diams.shape or log_deltas.ndim != 1:
            raise ValueError("Density and diameter sequences must have the same length")
        if log_deltas.size < 2:
            raise ValueError("A nested cover needs at least two levels")
        if not np.all(np.isfinite(log_deltas)) or np.any(log_deltas > 1e-15):
            raise ValueError("Density ratios must lie in (0, 1]")
        if not np.all(np.isfinite(log_diams)) or np.any(log_diams >= 0):
            raise ValueError("diameters not contracting")
        if np.any(np.diff(log_diams) >= 0):
            raise ValueError("Diameters must be strictly decreasing")

    @classmethod
    def from_sequences(cls, deltas: Sequence[float], diams: Sequence[float]) -> "NestedCoverSpec":
        deltas = np.asarray(deltas, dtype=float)
        diams = np.asarray(diams, dtype=float)
        if np.any(diams >= 1):
            raise ValueError("diameters not contracting")
        if np.any(deltas <= 0) or np.any(deltas > 1):
            raise ValueError("Density ratios must lie in (0, 1]")
        return cls(np.log(deltas), np.log(diams))

    @property
    def levels(self) -> int:
        return int(self.log_deltas.size)

    @property
    def deltas(self) -> np.ndarray:
        return np.exp(self.log_deltas)

    @property
    def diams(self) -> np.ndarray:
        return np.exp(self.log_diams)

    def scaled(self, factor: float) -> "NestedCoverSpec":
        """The same family with every diameter multiplied by ``factor``."""
        return NestedCoverSpec(self.log_deltas, self.log_diams + math.log(factor))


@dataclass(frozen=True)
class BoundSequence:
    """
    Per-level bounds beta_l for l = 1..L-1.

    ``raw`` keeps the unclamped values; ``values`` are clipped to [0, 2].
    ``tail_max`` is the maximum over the final quarter of levels, ``extrapolated``
    the polynomial extrapolation in 1/l of a monotone tail (None otherwise).
    """

    levels: np.ndarray
    raw: np.ndarray
    values: np.ndarray
    tail_max: float
    extrapolated: Optional[float]
    tail_differences: np.ndarray
    monotone: bool

    @property
    def limit(self) -> float:
        """Best estimate of the limit superior."""
        value = self.tail_max if self.extrapolated is None else self.extrapolated
        return float(min(2.0, max(0.0, value)))


def _extrapolate(levels: np.ndarray, raw: np.ndarray) -> Optional[float]:
    top = int(levels[-1])
    nodes = []
    level = top
    while level >= MIN_EXTRAPOLATION_LEVEL and len(nodes) < EXTRAPOLATION_NODES:
        nodes.append(level)
        level //= 2
    if len(nodes) < 3:
        return None
    nodes_arr = np.array(nodes)
    h = 1.0 / nodes_arr
    return float(BarycentricInterpolator(h, raw[nodes_arr - 1])(0.0))


def mcmullen_bound(spec: NestedCoverSpec) -> BoundSequence:
    """
    Evaluate beta_l = 2 - sum_{j=1}^{l+1} |log Delta_j| / |log d_l| for every level.

    The limit superior is estimated by the maximum over the final quarter; when
    that tail is monotone it is also extrapolated to l -> infinity.
    """
    levels = np.arange(1, spec.levels)
    losses = np.cumsum(np.abs(spec.log_deltas))
    raw = 2.0 - losses[1:] / np.abs(spec.log_diams[:-1])
    values = np.clip(raw, 0.0, 2.0)

    start = max(0, (3 * raw.size) // 4)
    tail = raw[start:]
    diffs = np.diff(tail)
    scale = max(1.0, float(np.max(np.abs(tail))))
    tol = 1e-12 * scale
    monotone = bool(np.all(diffs >= -tol) or np.all(diffs <= tol))
    extrapolated = _extrapolate(levels, raw) if monotone else None
    if not monotone:
        logger.warning("Bound sequence tail is not monotone; reporting the tail maximum")

    return BoundSequence(
        levels=levels,
        raw=raw,
        values=values,
        tail_max=float(np.max(tail)),
        extrapolated=extrapolated,
        tail_differences=diffs,
        monotone=monotone,
    )


def paper_cover_spec(
    rho: float, escape_radius: float, c2: float = 1.0, c7: float = 1.0, levels: int = 100
) -> NestedCoverSpec:
    """
    Cover for a model of order rho at a fixed escape radius R:
    d_l = (C2 / R^((1+rho)/2))^l and Delta_l = C7 / R.

    Raises:
        ValueError: If C2 / R^((1+rho)/2) >= 1 or C7 / R > 1
    """
    if rho <= 0 or escape_radius <= 1 or c2 <= 0 or c7 <= 0 or levels < 2:
        raise ValueError("Cover parameters must be positive with R > 1 and at least two levels")
    log_r = math.log(escape_radius)
    step = math.log(c2) - 0.5 * (1.0 + rho) * log_r
    if step >= 0:
        raise ValueError(f"Contraction violated: C2/R^((1+rho)/2) = {math.exp(step):.6g} >= 1")
    log_delta = math.log(c7) - log_r
    if log_delta > 0:
        raise ValueError(f"Density ratio C7/R = {math.exp(log_delta):.6g} exceeds 1")
    ell = np.arange(1, levels + 1)
    return NestedCoverSpec(np.full(levels, log_delta), ell * step)


def escaping_cover_spec(
    rho: float, c8: float = 1.0, c9: float = 1.0, levels: int = 100
) -> NestedCoverSpec:
    """
    Cover for the escaping set with radii R_k = e^k:
    d_k = prod_{j<=k} C8 / R_j^((1+rho)/2) and Delta_k = C9 / R_k.
    """
    if rho <= 0 or c8 <= 0 or c9 <= 0 or levels < 2:
        raise ValueError("Cover parameters must be positive with at least two levels")
    k = np.arange(1, levels + 1, dtype=float)
    first = math.log(c8) - 0.5 * (1.0 + rho)
    if first >= 0:
        raise ValueError(f"Contraction violated: C8/e^((1+rho)/2) = {math.exp(first):.6g} >= 1")
    log_deltas = math.log(c9) - k
    if np.any(log_deltas > 0):
        raise ValueError(f"Density ratio C9/e = {c9 / math.e:.6g} exceeds 1")
    log_diams = k * math.log(c8) - 0.5 * (1.0 + rho) * k * (k + 1) / 2.0
    return NestedCoverSpec(log_deltas, log_diams)


def wpexp_cover_spec(
    escape_radius: float, a4: float = 1.0, a5: float = 1.0, levels: int = 100
) -> NestedCoverSpec:
    """
    Cover for p(e^z + c): d_l = (A4 / (e^R R^(3/2)))^l and Delta_l = A5 / R^2.

    Raises:
        ValueError: If A4 >= e^R R^(3/2) or A5 > R^2
    """
    if escape_radius <= 1 or a4 <= 0 or a5 <= 0 or levels < 2:
        raise ValueError("Cover parameters must be positive with R > 1 and at least two levels")
    log_r = math.log(escape_radius)
    step = math.log(a4) - escape_radius - 1.5 * log_r
    if step >= 0:
        raise ValueError(f"Contraction violated: A4/(e^R R^(3/2)) = {math.exp(step):.6g} >= 1")
    log_delta = math.log(a5) - 2.0 * log_r
    if log_delta > 0:
        raise ValueError(f"Density ratio A5/R^2 = {math.exp(log_delta):.6g} exceeds 1")
    ell = np.arange(1, levels + 1)
    return NestedCoverSpec(np.full(levels, log_delta), ell * step)


def dimension_formula(rho: float) -> float:
    """2 rho / (1 + rho)."""
    if rho <= 0:
        raise ValueError(f"Order must be positive, got {rho}")
    if math.isinf(rho):
        return 2.0
    return 2.0 * rho / (1.0 + rho)


def order_from_dimension(d: float) -> float:
    """d / (2 - d), the inverse of ``dimension_formula``."""
    if not 0.0 <= d < 2.0:
        raise ValueError(f"Dimension must lie in [0, 2), got {d}")
    return d / (2.0 - d)


def box_counting_dimension(
    points: np.ndarray, scales: Sequence[float], min_points: int = 1000
) -> Tuple[float, np.ndarray]:
    """
    Box-counting slope of a planar point set.

    Boxes form an axis-aligned grid anchored at the lower-left corner of the
    bounding box.

    Args:
        points: Complex points
        scales: Decreasing box sizes (at least 4, spanning 1.5 decades)
        min_points: Smallest accepted sample

    Returns:
        Tuple (slope of log count against log(1/scale), counts per scale)
    """
    z = np.asarray(points, dtype=complex).ravel()
    s = np.asarray(scales, dtype=float)
    if z.size < min_points:
        raise ValueError(f"Need at least {min_points} points, got {z.size}")
    if s.size < 4 or np.any(s <= 0) or np.any(np.diff(s) >= 0):
        raise ValueError("insufficient scale span")
    if math.log10(s[0] / s[-1]) < 1.5 - 1e-12:
        raise ValueError("insufficient scale span")

    x = z.real - z.real.min()
    y = z.imag - z.imag.min()
    counts = np.empty(s.size, dtype=np.int64)
    for i, size in enumerate(s):
        ix = np.floor(x / size + 1e-9).astype(np.int64)
        iy = np.floor(y / size + 1e-9).astype(np.int64)
        counts[i] = np.unique(np.stack([ix, iy], axis=1), axis=0).shape[0]
    fit = stats.linregress(np.log(1.0 / s), np.log(counts))
    logger.debug(f"Box counts {counts.tolist()} give slope {fit.slope:.4f}")
    return float(fit.slope), counts


@dataclass(frozen=True)
class EscapingSample:
    """Sampled points of a finite-depth escaping set and the depth each reached."""

    points: np.ndarray
    depths: np.ndarray

    def __len__(self) -> int:
        return int(self.points.size)


def _survivors(
    m: ModelFunction,
    z: np.ndarray,
    schedule: Schedule,
    depth: int,
    exclude_seam: bool,
) -> Tuple[np.ndarray, np.ndarray]:
    if z.size == 0:
        return z, np.empty(0, dtype=np.int64)
    result = classify_points(m, z, schedule, depth)
    keep = result.is_class(Classification.ESCAPING)
    keep |= result.is_class(Classification.PREPOLE) & result.clean
    if exclude_seam:
        keep &= ~result.seam
    return z[keep], result.depth[keep]


def escaping_sampler(
    m: ModelFunction,
    region: PlanarRegion,
    schedule: Optional[Schedule] = None,
    depth: int = 1,
    refine: int = 0,
    factor: int = 2,
    exclude_seam: bool = True,
    workers: Optional[int] = None,
) -> EscapingSample:
    """
    Grid points of ``region`` whose k-th iterate lies outside D(0, R_k) for every
    k <= depth. Points landing on a pole along the way are kept with the step they
    hit it.

    After the grid pass each surviving cell is split ``factor`` x ``factor`` and
    tested again, ``refine`` times. Orbits touching the power-map seam are dropped
    when ``exclude_seam`` is set. A constant schedule gives the fixed-radius
    variant.
    """
    schedule = schedule or Schedule.exponential()
    if depth < 1:
        raise ValueError(f"Depth must be at least 1, got {depth}")
    if factor < 2:
        raise ValueError(f"Refinement factor must be at least 2, got {factor}")

    def block(start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
        z = region.grid_rows(start, stop).ravel()
        z = z[region.contains(z)]
        return _survivors(m, z, schedule, depth, exclude_seam)

    parts = map_row_blocks(block, region.shape[0], workers)
    points = np.concatenate([p[0] for p in parts])
    depths = np.concatenate([p[1] for p in parts])

    dx, dy = region.spacing
    for level in range(refine):
        dx, dy = dx / factor, dy / factor
        offsets = (np.arange(factor) - (factor - 1) / 2.0)
        sub = (offsets[None, :] * dx + 1j * offsets[:, None] * dy).ravel()
        candidates = (points[:, None] + sub[None, :]).ravel()
        candidates = candidates[region.contains(candidates)]
        points, depths = _survivors(m, candidates, schedule, depth, exclude_seam)
        logger.debug(f"Refinement {level + 1}: {points.size} survivors")

    logger.info(f"Escaping sampler kept {points.size} points at depth {depth}")
    return EscapingSample(points=points, depths=depths)


def pullback_sampler(
    m: ModelFunction,
    region: PlanarRegion,
    depth: int = 6,
    chains: int = 16,
    margin: float = 2.0,
) -> EscapingSample:
    """
    Points of ``region`` escaping through ``depth`` steps of the schedule e^k,
    found by pulling escaping orbits back instead of searching a grid.

    Each chain is a point w whose orbit beats margin * e^(j+1) for j < depth with
    |w| >= margin * e; every solution of f(z) = w in the region then escapes
    through ``depth`` steps. Chains differ in the argument of their innermost
    target and in the branch of w, so the solutions spread around each pole.
    Every point is checked again by forward iteration; the ones lost to rounding
    are dropped.

    Raises:
        ValueError: If ``depth`` < 2 or ``chains`` < 1
    """
    if depth < 2:
        raise ValueError(f"Pull-back depth must be at least 2, got {depth}")
    if chains < 1:
        raise ValueError(f"Need at least one chain, got {chains}")
    radius = max(
        abs(complex(x, y)) for x in (region.x_min, region.x_max) for y in (region.y_min, region.y_max)
    )
    found = []
    for i in range(chains):
        target = backward_orbit(
            m,
            depth - 1,
            margin * math.e,
            angle=2.0 * math.pi * i / chains,
            offset=i % 4,
            escape_start=True,
        )
        z = m.level_points(target, radius)
        found.append(z[region.contains(z)])
    points = np.unique(np.concatenate(found))

    result = classify_points(m, points, Schedule.exponential(), depth)
    keep = result.is_class(Classification.ESCAPING)
    logger.info(
        f"Pull-back sampler: {int(keep.sum())} of {points.size} points escape through depth {depth}"
    )
    return EscapingSample(points=points[keep], depths=result.depth[keep])
