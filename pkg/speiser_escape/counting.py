"""
Counting Functions
==================
Pole counts n(r), integrated counts N(r), proximity m(r) and the characteristic
T(r) = m(r) + N(r), plus order and lower-order estimates from log-log fits of n(r).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from speiser_escape.cache import inventory_cache
from speiser_escape.config import settings
from speiser_escape.models import ModelFunction, PoleInventory
from speiser_escape.parallel import map_row_blocks
from speiser_escape.sphere_geometry import HUGE_VALUE

logger = logging.getLogger(__name__)

# Relative radius nudge when the circle passes too close to a pole.
NUDGE = 1e-6


@dataclass(frozen=True)
class CountingSample:
    """Counting functions sampled on an increasing radius grid."""

    radii: np.ndarray
    n: np.ndarray
    N: np.ndarray
    m: np.ndarray
    T: np.ndarray
    nudged: np.ndarray


@dataclass(frozen=True)
class OrderEstimate:
    """Least-squares slope of log n against log r over a radius window."""

    slope: float
    intercept: float
    residual: float
    window: Tuple[float, float]
    points: int


def log_radii(r_min: float, r_max: float, per_decade: Optional[int] = None) -> np.ndarray:
    """Geometric radius grid from r_min to r_max with ``per_decade`` radii per decade."""
    if not 0 < r_min < r_max:
        raise ValueError(f"Invalid radius range [{r_min}, {r_max}]")
    per_decade = per_decade or settings.radii_per_decade
    count = max(2, int(math.ceil(per_decade * math.log10(r_max / r_min))) + 1)
    return np.geomspace(r_min, r_max, count)


def _inventory(m: ModelFunction, radius: float) -> PoleInventory:
    return inventory_cache.inventory(m, radius)


def _cumulative_counts(inventory: PoleInventory, radii: np.ndarray) -> np.ndarray:
    moduli = inventory.moduli
    order = np.argsort(moduli, kind="stable")
    cumulative = np.concatenate([[0], np.cumsum(inventory.multiplicities[order])])
    index = np.searchsorted(moduli[order], radii, side="right")
    return cumulative[index].astype(int)


def count_poles(m: ModelFunction, r: float) -> int:
    """n(r): poles in the closed disk of radius r, counted with multiplicity."""
    if r <= 0:
        raise ValueError(f"Radius must be positive, got {r}")
    return int(np.sum(_inventory(m, r).multiplicities))


def counting_function(m: ModelFunction, radii: Sequence[float]) -> np.ndarray:
    """n(r) on a radius grid, from a single inventory at the largest radius."""
    radii = np.asarray(radii, dtype=float)
    return _cumulative_counts(_inventory(m, float(np.max(radii))), radii)


def integrated_counting_exact(
    moduli: Sequence[float], multiplicities: Sequence[int], r: float
) -> float:
    """
    N(r) from the exact jump radii: sum over 0 < |a| <= r of mult * log(r/|a|),
    plus n(0) log r for poles at the origin.
    """
    moduli = np.asarray(moduli, dtype=float)
    mult = np.asarray(multiplicities, dtype=float)
    at_origin = moduli == 0
    inside = (moduli <= r) & ~at_origin
    n0 = float(np.sum(mult[at_origin]))
    terms = mult[inside] * np.log(r / moduli[inside])
    return math.fsum(terms) + n0 * math.log(r)


def integrated_counting(
    radii: Sequence[float], counts: Sequence[float], r: float, n0: float = 0.0
) -> float:
    """
    N(r) from sampled counts, integrating n(t) as a right-continuous step function.

    n is n0 below the first sample and holds the value of the left sample on each
    [r_i, r_{i+1}); the integrand (n(t) - n0)/t dt becomes (n - n0) d(log t).

    Args:
        radii: Increasing sample radii
        counts: n at the sample radii
        r: Evaluation radius
        n0: Pole count at the origin

    Returns:
        The integrated counting function at r
    """
    radii = np.asarray(radii, dtype=float)
    counts = np.asarray(counts, dtype=float)
    keep = radii <= r
    if not np.any(keep):
        return n0 * math.log(r) if n0 else 0.0
    widths = np.diff(np.log(np.append(radii[keep], r)))
    excess = math.fsum((counts[keep] - n0) * widths)
    return excess + n0 * math.log(r)


def _safe_radius(inventory: PoleInventory, r: float, eps: float) -> Tuple[float, bool]:
    """Push r outward until the circle keeps distance eps from every pole."""
    moduli = inventory.moduli
    nudged = False
    for _ in range(32):
        if moduli.size == 0 or np.min(np.abs(moduli - r)) >= eps:
            break
        r *= 1.0 + NUDGE
        nudged = True
    if nudged:
        logger.debug(f"Circle radius nudged to {r!r} to clear a pole")
    return r, nudged


def _circle_values(m: ModelFunction, r: float, q: int) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(q) / q
    return m.evaluate(r * np.exp(1j * theta)).values


def _log_plus(values: np.ndarray) -> np.ndarray:
    modulus = np.where(np.isfinite(values), np.abs(values), HUGE_VALUE)
    with np.errstate(divide="ignore"):
        return np.maximum(0.0, np.log(np.maximum(modulus, 1e-300)))


def _eps(m: ModelFunction) -> float:
    try:
        return m.elliptic.eps_pole
    except (AttributeError, NotImplementedError):
        return 0.0


def proximity_detail(
    m: ModelFunction,
    r: float,
    quadrature_points: Optional[int] = None,
    inventory: Optional[PoleInventory] = None,
) -> Tuple[float, float, bool]:
    """
    m(r) with the radius actually used and whether it was nudged.

    Returns:
        Tuple (m(r), radius used, nudged)
    """
    q = quadrature_points or settings.quadrature_points
    if inventory is None:
        inventory = _inventory(m, r * 1.01)
    used, nudged = _safe_radius(inventory, r, _eps(m))
    values = _circle_values(m, used, q)
    return float(np.mean(_log_plus(values))), used, nudged


def proximity(m: ModelFunction, r: float, quadrature_points: Optional[int] = None) -> float:
    """m(r) = (1/2pi) * integral of log+ |f(r e^it)| dt, trapezoid rule with Q points."""
    value, _, _ = proximity_detail(m, r, quadrature_points)
    return value


def sample_counting(
    m: ModelFunction,
    radii: Sequence[float],
    quadrature_points: Optional[int] = None,
    workers: Optional[int] = None,
) -> CountingSample:
    """
    Sample n, N, m and T on a radius grid.

    Per-radius proximity work runs in parallel and is reassembled by radius.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise ValueError("Radii must be positive and strictly increasing")
    inventory = _inventory(m, float(radii[-1]) * 1.01)
    n = _cumulative_counts(inventory, radii)
    big_n = np.array(
        [integrated_counting_exact(inventory.moduli, inventory.multiplicities, r) for r in radii]
    )

    def block(start: int, stop: int):
        return [
            proximity_detail(m, float(r), quadrature_points, inventory) for r in radii[start:stop]
        ]

    rows = [item for part in map_row_blocks(block, radii.size, workers, block=4) for item in part]
    prox = np.array([row[0] for row in rows])
    nudged = np.array([row[2] for row in rows], dtype=bool)
    logger.info(f"Sampled counting functions at {radii.size} radii ({int(nudged.sum())} nudged)")
    return CountingSample(radii=radii, n=n, N=big_n, m=prox, T=prox + big_n, nudged=nudged)


def estimate_order(cs: CountingSample, window: Tuple[float, float]) -> OrderEstimate:
    """
    Slope of log n(r) against log r over the radius window.

    Raises:
        ValueError: If fewer than 5 radii with n > 0 fall inside the window
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"Empty radius window [{lo}, {hi}]")
    use = (cs.radii >= lo) & (cs.radii <= hi) & (cs.n > 0)
    if int(np.count_nonzero(use)) < 5:
        raise ValueError("window too small")
    x = np.log(cs.radii[use])
    y = np.log(cs.n[use].astype(float))
    fit = stats.linregress(x, y)
    residual = float(np.sqrt(np.mean((y - (fit.intercept + fit.slope * x)) ** 2)))
    return OrderEstimate(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        residual=residual,
        window=(float(lo), float(hi)),
        points=int(np.count_nonzero(use)),
    )


def estimate_lower_order(cs: CountingSample, windows: Sequence[Tuple[float, float]]) -> OrderEstimate:
    """Lower order: the smallest window slope over a family of windows."""
    estimates = [estimate_order(cs, w) for w in windows]
    return min(estimates, key=lambda e: e.slope)


def fft_residual(
    m: ModelFunction,
    a: complex,
    radii: Sequence[float],
    quadrature_points: Optional[int] = None,
) -> float:
    """
    sup over radii of |T(r, f) - T(r, 1/(f - a))|.

    The a-points come from the model's level-point enumeration; the difference is
    bounded by log+|a| + log 2 but does not tend to zero.
    """
    level_points = getattr(m, "level_points", None)
    if level_points is None:
        raise ValueError(f"a-point counting is not available for {type(m).__name__}")
    radii = np.asarray(radii, dtype=float)
    q = quadrature_points or settings.quadrature_points
    inventory = _inventory(m, float(radii[-1]) * 1.01)
    points = np.asarray(level_points(a, float(radii[-1]) * 1.01))
    ones = np.ones(points.size)

    worst = 0.0
    for r in radii:
        used, _ = _safe_radius(inventory, float(r), _eps(m))
        values = _circle_values(m, used, q)
        diff = np.where(np.isfinite(values), values - a, values)
        with np.errstate(divide="ignore"):
            inverse = np.where(diff == 0, np.inf, 1.0 / np.where(diff == 0, 1.0, diff))
        t_f = float(np.mean(_log_plus(values))) + integrated_counting_exact(
            inventory.moduli, inventory.multiplicities, used
        )
        t_a = float(np.mean(_log_plus(inverse))) + integrated_counting_exact(
            np.abs(points), ones, used
        )
        worst = max(worst, abs(t_f - t_a))
    return worst
