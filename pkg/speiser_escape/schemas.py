"""
Run Configuration and Report Schemas
====================================
Flat key = value run configuration for the command line, and the report models
the commands print.
"""

import logging
import math
from enum import Enum
from io import StringIO
from pathlib import Path
from typing import Dict, List, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, model_validator

from speiser_escape.elliptic import EllipticFunction, Lattice, lattice_with_opening
from speiser_escape.interpolation import IdentityBoundary, InterpolationStack, SineBoundary
from speiser_escape.models import (
    Branch,
    GluedOrderTwo,
    ModelFunction,
    PlainWp,
    PowerLift,
    WpCosh,
    WpExp,
    WpPower,
)
from speiser_escape.orbits import Schedule, ScheduleKind
from speiser_escape.sphere_geometry import PlanarRegion

logger = logging.getLogger(__name__)


class ModelVariant(str, Enum):
    """Model catalog entries selectable from a run configuration."""

    PLAIN = "plain"
    WP_EXP = "wp_exp"
    WP_COSH = "wp_cosh"
    WP_POWER = "wp_power"
    POWER_LIFT = "power_lift"
    GLUED = "glued"


class CoverKind(str, Enum):
    """Nested cover used by the dimension bound."""

    PAPER = "paper"
    ESCAPING = "escaping"
    WPEXP = "wpexp"
    FILE = "file"


# Constants that must be strictly positive whenever they are set.
POSITIVE_FIELDS = (
    "r_min",
    "r_max",
    "escape_radius",
    "c1",
    "c2",
    "c3",
    "c4",
    "c5",
    "c6",
    "c7",
    "c8",
    "c9",
    "a1",
    "a2",
    "a3",
    "a4",
    "a5",
    "rho",
    "schedule_base",
)


class RunConfig(BaseModel):
    """
    Parameters of one command run.

    Complex parameters are split into ``_re`` and ``_im`` keys. Unknown keys are
    rejected.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, use_enum_values=False)

    # Model
    variant: ModelVariant = Field(default=ModelVariant.PLAIN, description="Model family")
    omega1_re: float = Field(default=1.0, description="First period, real part")
    omega1_im: float = Field(default=0.0, description="First period, imaginary part")
    omega2_re: float = Field(default=0.0, description="Second period, real part")
    omega2_im: float = Field(default=1.0, description="Second period, imaginary part")
    opening_lattice: bool = Field(
        default=False, description="Use the lattice whose period ratio has argument rho*pi/2"
    )
    rho: float = Field(default=1.0, description="Order of the power-map models")
    shift_re: Optional[float] = Field(default=None, description="Shift c, real part")
    shift_im: Optional[float] = Field(default=None, description="Shift c, imaginary part")
    branch: Branch = Field(default=Branch.PLUS, description="Power-map branch on the seam")
    truncation: int = Field(default=10, ge=8, description="Shell count of the direct lattice sums")
    lower_omega2_re: Optional[float] = Field(default=None, description="Lower lattice period, real part")
    lower_omega2_im: Optional[float] = Field(default=None, description="Lower lattice period, imaginary part")
    stack_amplitude: float = Field(default=0.0, description="Sine displacement of the upper boundary maps")

    # Counting
    r_min: float = Field(default=10.0, description="Smallest sampled radius")
    r_max: float = Field(default=1000.0, description="Largest sampled radius")
    radii_per_decade: int = Field(default=64, ge=1, description="Radius grid density")
    quadrature_points: int = Field(default=4096, ge=8, description="Circle points for m(r)")
    window_min: Optional[float] = Field(default=None, description="Order-fit window start")
    window_max: Optional[float] = Field(default=None, description="Order-fit window end")

    # Dimension bound
    cover: CoverKind = Field(default=CoverKind.PAPER, description="Nested cover family")
    escape_radius: float = Field(default=1e6, description="Escape radius R")
    levels: int = Field(default=100, ge=2, description="Number of cover levels")
    sequence_file: Optional[str] = Field(default=None, description="CSV with delta, diam columns")
    c1: float = Field(default=0.5, description="Inverse-branch derivative constant")
    c2: float = Field(default=1.0, description="Diameter constant")
    c3: float = Field(default=1.0, description="Recorded only")
    c4: float = Field(default=1.0, description="Recorded only")
    c5: float = Field(default=1.0, description="Recorded only")
    c6: float = Field(default=1.0, description="Recorded only")
    c7: float = Field(default=1.0, description="Density constant")
    c8: float = Field(default=1.0, description="Diameter constant of the escaping cover")
    c9: float = Field(default=1.0, description="Density constant of the escaping cover")
    a1: float = Field(default=1.0, description="Recorded only")
    a2: float = Field(default=1.0, description="Recorded only")
    a3: float = Field(default=1.0, description="Recorded only")
    a4: float = Field(default=1.0, description="Diameter constant of the exponential cover")
    a5: float = Field(default=1.0, description="Density constant of the exponential cover")

    # Rendering
    x_min: float = Field(default=0.0)
    x_max: float = Field(default=4.0)
    y_min: float = Field(default=-math.pi)
    y_max: float = Field(default=math.pi)
    resolution: int = Field(default=256, ge=16, description="Pixels per axis")
    schedule: ScheduleKind = Field(default=ScheduleKind.EXPONENTIAL, description="Escape radii")
    schedule_base: float = Field(default=math.e, description="Base or constant radius")
    cap: int = Field(default=64, ge=1, description="Iteration cap")

    # Execution
    workers: Optional[int] = Field(default=None, ge=1, description="Worker threads")
    output: Optional[str] = Field(default=None, description="Output path")

    @model_validator(mode="after")
    def check_ranges(self) -> "RunConfig":
        for name in POSITIVE_FIELDS:
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if not self.r_min < self.r_max:
            raise ValueError(f"Empty radius range [{self.r_min}, {self.r_max}]")
        lo, hi = self.window
        if not lo < hi:
            raise ValueError(f"Empty order window [{lo}, {hi}]")
        if lo < self.r_min or hi > self.r_max:
            raise ValueError(f"Order window [{lo}, {hi}] leaves the sampled radii")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("Degenerate render region")
        if self.cover is CoverKind.FILE and not self.sequence_file:
            raise ValueError("cover = file needs sequence_file")
        if (self.shift_re is None) != (self.shift_im is None):
            raise ValueError("shift_re and shift_im must be given together")
        if (self.lower_omega2_re is None) != (self.lower_omega2_im is None):
            raise ValueError("lower_omega2_re and lower_omega2_im must be given together")
        return self

    @property
    def window(self) -> tuple[float, float]:
        lo = self.r_min if self.window_min is None else self.window_min
        hi = self.r_max if self.window_max is None else self.window_max
        return lo, hi

    @property
    def shift(self) -> Optional[complex]:
        if self.shift_re is None or self.shift_im is None:
            return None
        return complex(self.shift_re, self.shift_im)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        """Parse flat ``key = value`` text; ``#`` starts a comment."""
        values = dotenv_values(stream=StringIO(text), interpolate=False)
        return cls.model_validate({k.strip().lower(): v for k, v in values.items() if v is not None})

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"Config file not found: {path}")
        logger.debug(f"Reading run configuration from {path}")
        return cls.from_text(path.read_text())

    def to_config_text(self) -> str:
        """Effective configuration in the same flat grammar, one key per line."""
        lines = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, Enum):
                value = value.value
            elif isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{name} = {value}")
        return "\n".join(lines) + "\n"

    def lattice(self, rho: Optional[float] = None) -> Lattice:
        omega1 = complex(self.omega1_re, self.omega1_im)
        if self.opening_lattice:
            return lattice_with_opening((self.rho if rho is None else rho) * math.pi, omega1)
        return Lattice(omega1, complex(self.omega2_re, self.omega2_im))

    def elliptic(self, lattice: Optional[Lattice] = None) -> EllipticFunction:
        return EllipticFunction(lattice or self.lattice(), truncation=self.truncation)

    def build_model(self) -> ModelFunction:
        """Instantiate the configured model."""
        variant = self.variant
        if variant is ModelVariant.PLAIN:
            return PlainWp(self.elliptic())
        if variant is ModelVariant.WP_EXP:
            return WpExp(self.elliptic(), self.shift)
        if variant is ModelVariant.WP_COSH:
            lat = Lattice(complex(self.omega1_re, 0.0), 2j * math.pi)
            return WpCosh(EllipticFunction(lat, truncation=self.truncation))
        if variant is ModelVariant.WP_POWER:
            return WpPower(self.elliptic(), self.rho, self.shift, self.branch)
        if variant is ModelVariant.POWER_LIFT:
            n = int(math.floor(self.rho))
            f = self.elliptic(self.lattice(self.rho / max(n, 1)))
            return PowerLift.for_order(self.rho, f, self.shift, self.branch)
        if variant is ModelVariant.GLUED:
            upper = self.elliptic()
            if self.lower_omega2_re is None or self.lower_omega2_im is None:
                lower = upper
            else:
                lower = self.elliptic(
                    Lattice(1.0, complex(self.lower_omega2_re, self.lower_omega2_im))
                )
            chi = (
                SineBoundary(self.stack_amplitude)
                if self.stack_amplitude
                else IdentityBoundary()
            )
            stack = InterpolationStack(1.0, 1.0, 0.0, IdentityBoundary(), chi)
            return GluedOrderTwo(upper, lower, stack, stack, self.shift)
        raise ValueError(f"Unknown model variant {variant}")

    def region(self) -> PlanarRegion:
        return PlanarRegion(self.x_min, self.x_max, self.y_min, self.y_max, resolution=self.resolution)

    def build_schedule(self) -> Schedule:
        return Schedule(self.schedule, self.schedule_base)


class CountingReport(BaseModel):
    """Order estimate summary of a counting run."""

    variant: str = Field(..., description="Model family")
    window: List[float] = Field(..., description="Radius window of the fit")
    slope: float = Field(..., description="Estimated order")
    intercept: float
    residual: float = Field(..., description="RMS residual of the log-log fit")
    points: int = Field(..., description="Radii used in the fit")
    nudged: int = Field(default=0, description="Radii moved off a pole")
    output: str


class DimBoundReport(BaseModel):
    """Dimension lower bound next to the target 2 rho / (1 + rho)."""

    cover: str
    limit: float
    tail_max: float
    extrapolated: Optional[float] = None
    monotone: bool
    target: float
    gap: float
    output: str


class RenderReport(BaseModel):
    width: int
    height: int
    counts: Dict[str, int] = Field(default_factory=dict)
    image: str
    points: str


class SuiteResult(BaseModel):
    """Outcome of one self-test suite."""

    name: str
    passed: bool
    failures: List[str] = Field(default_factory=list)
    seconds: float = 0.0
