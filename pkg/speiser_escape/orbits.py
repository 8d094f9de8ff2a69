"""
Orbits
======
Iteration of model maps with escape classification against a radius schedule,
and row-parallel escape-time fields.

An orbit escapes through depth k when |z_j| > R_j for every step j <= k. Landing
on infinity ends the orbit as a prepole. Orbits that beat the schedule at some
steps and not others, or whose argument leaves the range where the map is
resolved in double precision, are undetermined.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from speiser_escape.config import settings
from speiser_escape.elliptic import solve_wp
from speiser_escape.models import ModelFunction, PlainWp, WpExp
from speiser_escape.parallel import map_row_blocks
from speiser_escape.sphere_geometry import INFINITY, PlanarRegion

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class Classification(str, Enum):
    ESCAPING = "escaping"
    PREPOLE = "prepole"
    BOUNDED = "bounded"
    UNDETERMINED = "undetermined"


CLASS_CODES = {
    Classification.ESCAPING: 0,
    Classification.PREPOLE: 1,
    Classification.BOUNDED: 2,
    Classification.UNDETERMINED: 3,
}
CODE_CLASSES = {code: cls for cls, code in CLASS_CODES.items()}


class ScheduleKind(str, Enum):
    EXPONENTIAL = "exponential"
    CONSTANT = "constant"


@dataclass(frozen=True)
class Schedule:
    """
    Escape radii R_k for k = 1, 2, ...

    exponential: R_k = base^k (base e by default); constant: R_k = base, which may
    be infinite.
    """

    kind: ScheduleKind = ScheduleKind.EXPONENTIAL
    base: float = math.e

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.kind is ScheduleKind.EXPONENTIAL and not (1.0 < self.base < math.inf):
            raise ValueError(f"Exponential schedule needs a finite base above 1, got {self.base}")
        if self.kind is ScheduleKind.CONSTANT and not self.base >= 0:
            raise ValueError(f"Constant schedule radius must be non-negative, got {self.base}")

    @classmethod
    def exponential(cls, base: float = math.e) -> "Schedule":
        return cls(ScheduleKind.EXPONENTIAL, base)

    @classmethod
    def constant(cls, radius: float) -> "Schedule":
        return cls(ScheduleKind.CONSTANT, radius)

    def radius(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"Schedule steps start at 1, got {k}")
        if self.kind is ScheduleKind.CONSTANT:
            return self.base
        try:
            return self.base**k
        except OverflowError:
            return math.inf

    def radii(self, cap: int) -> np.ndarray:
        return np.array([self.radius(k) for k in range(1, cap + 1)])


@dataclass(frozen=True)
class OrbitRecord:
    """
    Forward orbit of a single point.

    ``depth`` is the escape depth for escaping orbits, the step that hit infinity
    for prepoles, the length of the initial escaping run for undetermined orbits
    and 0 for bounded ones. The trajectory starts at the initial point.
    """

    initial: complex
    trajectory: Tuple[complex, ...]
    classification: Classification
    depth: int
    schedule: Schedule
    steps: int


@dataclass(frozen=True)
class ClassifiedPoints:
    """Vectorized classification of many starting points."""

    codes: np.ndarray
    depth: np.ndarray
    modulus: np.ndarray
    clean: np.ndarray
    seam: np.ndarray

    def is_class(self, cls: Classification) -> np.ndarray:
        return self.codes == CLASS_CODES[cls]


@dataclass(frozen=True)
class EscapeField:
    """Per-pixel classification, depth and final modulus on a region grid."""

    region: PlanarRegion
    codes: np.ndarray
    depth: np.ndarray
    modulus: np.ndarray
    inside: np.ndarray
    cap: int
    schedule: Schedule

    @property
    def shape(self) -> Tuple[int, int]:
        return self.codes.shape

    def count(self, cls: Classification) -> int:
        return int(np.count_nonzero((self.codes == CLASS_CODES[cls]) & self.inside))

    def fraction(self, cls: Classification) -> float:
        total = int(np.count_nonzero(self.inside))
        return self.count(cls) / total if total else 0.0

    def escaping_points(self) -> Tuple[np.ndarray, np.ndarray]:
        """Escaping pixel centers in row order with their depths."""
        mask = (self.codes == CLASS_CODES[Classification.ESCAPING]) & self.inside
        grid = self.region.grid()
        return grid[mask], self.depth[mask]


def classify_points(
    m: ModelFunction, z: np.ndarray, schedule: Schedule, cap: int
) -> ClassifiedPoints:
    """
    Classify the orbits of an array of starting points.

    ``clean`` marks orbits that beat the schedule at every step they took; for a
    prepole this means every step before the pole, with a finite radius at the
    step that hit it.
    """
    if cap < 1:
        raise ValueError(f"Iteration cap must be at least 1, got {cap}")
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    current = z.ravel().copy()
    n = current.size

    codes = np.full(n, -1, dtype=np.int8)
    depth = np.zeros(n, dtype=np.int64)
    streak = np.zeros(n, dtype=np.int64)
    all_out = np.ones(n, dtype=bool)
    any_out = np.zeros(n, dtype=bool)
    seam = np.zeros(n, dtype=bool)
    modulus = np.abs(current)
    active = np.ones(n, dtype=bool)

    for k in range(1, cap + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        radius = schedule.radius(k)
        result = m.evaluate(current[idx])
        values = result.values
        seam[idx] |= result.seam

        lost = ~result.resolved
        pole = result.resolved & ~np.isfinite(values)
        live = result.resolved & np.isfinite(values)

        gone = idx[lost]
        codes[gone] = CLASS_CODES[Classification.UNDETERMINED]
        depth[gone] = streak[gone]
        all_out[gone] = False

        hit = idx[pole]
        codes[hit] = CLASS_CODES[Classification.PREPOLE]
        depth[hit] = k
        modulus[hit] = math.inf
        all_out[hit] &= radius < math.inf

        j = idx[live]
        w = values[live]
        out = np.abs(w) > radius
        all_out[j] &= out
        any_out[j] |= out
        streak[j] = np.where(all_out[j], k, streak[j])
        current[j] = w
        modulus[j] = np.abs(w)
        active[gone] = False
        active[hit] = False

    done = codes == -1
    codes[done & all_out] = CLASS_CODES[Classification.ESCAPING]
    depth[done & all_out] = cap
    codes[done & ~any_out] = CLASS_CODES[Classification.BOUNDED]
    mixed = done & any_out & ~all_out
    codes[mixed] = CLASS_CODES[Classification.UNDETERMINED]
    depth[mixed] = streak[mixed]

    return ClassifiedPoints(
        codes=codes.reshape(shape),
        depth=depth.reshape(shape),
        modulus=modulus.reshape(shape),
        clean=all_out.reshape(shape),
        seam=seam.reshape(shape),
    )


def iterate(
    m: ModelFunction,
    z: complex,
    schedule: Optional[Schedule] = None,
    cap: Optional[int] = None,
) -> OrbitRecord:
    """
    Iterate ``m`` from ``z`` for at most ``cap`` steps.

    Args:
        m: Model function
        z: Initial point
        schedule: Escape radii (defaults to R_k = e^k)
        cap: Iteration cap (defaults to settings.iteration_cap)

    Returns:
        The orbit record; the trajectory keeps at most settings.trajectory_cap points
    """
    schedule = schedule or Schedule.exponential()
    cap = settings.iteration_cap if cap is None else cap
    if cap < 1:
        raise ValueError(f"Iteration cap must be at least 1, got {cap}")

    current = complex(z)
    trajectory = [current]
    streak = 0
    beaten_every_step = True
    beaten_once = False
    classification: Optional[Classification] = None
    depth = 0
    steps = 0

    for k in range(1, cap + 1):
        result = m.evaluate(np.array([current]))
        value = complex(result.values[0])
        steps = k
        if not bool(result.resolved[0]):
            classification, depth = Classification.UNDETERMINED, streak
            break
        if not np.isfinite(value):
            trajectory.append(INFINITY)
            classification, depth = Classification.PREPOLE, k
            break
        out = abs(value) > schedule.radius(k)
        beaten_every_step &= out
        beaten_once |= out
        if beaten_every_step:
            streak = k
        current = value
        if len(trajectory) < settings.trajectory_cap:
            trajectory.append(current)

    if classification is None:
        if beaten_every_step:
            classification, depth = Classification.ESCAPING, cap
        elif not beaten_once:
            classification, depth = Classification.BOUNDED, 0
        else:
            classification, depth = Classification.UNDETERMINED, streak

    return OrbitRecord(
        initial=complex(z),
        trajectory=tuple(trajectory[: settings.trajectory_cap]),
        classification=classification,
        depth=depth,
        schedule=schedule,
        steps=steps,
    )


def render_escape_field(
    m: ModelFunction,
    region: PlanarRegion,
    schedule: Optional[Schedule] = None,
    cap: Optional[int] = None,
    workers: Optional[int] = None,
) -> EscapeField:
    """
    Classify the orbit of every pixel center of ``region``.

    Rows are processed in parallel blocks and assembled top to bottom.

    Raises:
        ValueError: If the grid is smaller than 16 pixels per axis
    """
    schedule = schedule or Schedule.exponential()
    cap = settings.iteration_cap if cap is None else cap
    ny, nx = region.shape
    if min(nx, ny) < 16:
        raise ValueError(f"Escape fields need at least 16 pixels per axis, got {nx}x{ny}")

    def block(start: int, stop: int) -> ClassifiedPoints:
        return classify_points(m, region.grid_rows(start, stop), schedule, cap)

    parts = map_row_blocks(block, ny, workers)
    grid = region.grid()
    field = EscapeField(
        region=region,
        codes=np.concatenate([p.codes for p in parts]),
        depth=np.concatenate([p.depth for p in parts]),
        modulus=np.concatenate([p.modulus for p in parts]),
        inside=region.contains(grid),
        cap=cap,
        schedule=schedule,
    )
    logger.info(
        f"Rendered {nx}x{ny} escape field for {m.variant}: "
        f"{field.count(Classification.ESCAPING)} escaping, "
        f"{field.count(Classification.PREPOLE)} prepole"
    )
    return field


def backward_orbit(
    m: ModelFunction,
    depth: int,
    margin: float = 2.0,
    angle: float = 0.0,
    offset: int = 0,
    escape_start: bool = False,
) -> complex:
    """
    A starting point whose j-th iterate has modulus at least margin * e^j for
    j = 1..depth, built by pulling a large target back through inverse branches.

    Supports PlainWp (branches u + n w1) and WpExp (branches log(u - c) + 2 pi i k).

    Args:
        m: Model function
        depth: Number of guaranteed escaping steps
        margin: Factor over the schedule e^j
        angle: Argument of the innermost target
        offset: Extra branch index added to the returned point
        escape_start: Also require |z| >= margin for the returned point
    """
    if depth < 1:
        raise ValueError(f"Depth must be at least 1, got {depth}")
    f = m.elliptic
    z = margin * math.exp(depth) * complex(math.cos(angle), math.sin(angle))
    for j in range(depth, 0, -1):
        u = complex(solve_wp(f, z)[0])
        need = margin * math.exp(j - 1) if j > 1 or escape_start else 0.0
        extra = offset if j == 1 else 0
        if isinstance(m, PlainWp):
            step = abs(f.lattice.omega1)
            n = math.ceil((need + abs(u)) / step) + 1 if need else 0
            z = u + (n + extra) * f.lattice.omega1
        elif isinstance(m, WpExp):
            base = complex(np.log(u - m.c))
            k = math.ceil((need + abs(base.real) + abs(base.imag)) / TWO_PI) if need else 0
            z = base + 1j * TWO_PI * (k + extra)
        else:
            raise ValueError(f"No inverse branches for {type(m).__name__}")
    return z
