"""
Covering Estimates
==================
Koebe distortion bounds and the pole-neighbourhood covering used for the
dimension lower bound.

Around a pole a_j with leading coefficient b_j the set {|f| > R} has a component
U_j squeezed between the disks of radius |b_j|/(4 sqrt R) and 2|b_j|/sqrt R. An
inverse branch g_j of f from {|w| > R} into U_j satisfies
|g_j'(w)| <= C1 |b_j| / |w|^(3/2), and composing such branches along a chain of
poles shrinks diameters geometrically.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from speiser_escape.models import ModelFunction, PoleDatum, minimum_escape_radius

logger = logging.getLogger(__name__)

# Inverse-branch constant of the exact local model (b/(z - a))^2.
DEFAULT_C1 = 0.5


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) <= self.radius


@dataclass(frozen=True)
class CoverComponent:
    """Inner and outer disks around a pole enclosing the component of {|f| > R}."""

    pole: complex
    coefficient: float
    escape_radius: float
    inner_radius: float
    outer_radius: float

    @property
    def inner(self) -> Disk:
        return Disk(self.pole, self.inner_radius)

    @property
    def outer(self) -> Disk:
        return Disk(self.pole, self.outer_radius)


@dataclass(frozen=True)
class BranchChain:
    """
    Sequence of poles (a_j1, ..., a_jl) for a composed inverse branch.

    Args:
        poles: Pole locations in chain order
        coefficients: Leading coefficients |b_jk|
        c1: Inverse-branch derivative constant
    """

    poles: Tuple[complex, ...]
    coefficients: Tuple[float, ...]
    c1: float = DEFAULT_C1

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(complex(a) for a in self.poles))
        object.__setattr__(self, "coefficients", tuple(float(b) for b in self.coefficients))
        if not self.poles:
            raise ValueError("Branch chain must contain at least one pole")
        if len(self.poles) != len(self.coefficients):
            raise ValueError("Branch chain needs one coefficient per pole")
        if self.c1 <= 0:
            raise ValueError(f"Branch constant C1 must be positive, got {self.c1}")

    @classmethod
    def from_poles(cls, poles: Sequence[PoleDatum], c1: float = DEFAULT_C1) -> "BranchChain":
        return cls(tuple(p.location for p in poles), tuple(p.coefficient for p in poles), c1)

    def __len__(self) -> int:
        return len(self.poles)

    def __add__(self, other: "BranchChain") -> "BranchChain":
        if self.c1 != other.c1:
            raise ValueError("Cannot concatenate chains with different C1")
        return BranchChain(self.poles + other.poles, self.coefficients + other.coefficients, self.c1)


def _check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"Koebe ratio must lie in (0, 1), got {lam}")


def koebe_value_bounds(deriv: float, r: float, lam: float) -> Tuple[float, float]:
    """
    Distortion of a univalent map on D(z0, r) at |z - z0| = lam * r.

    Returns the bounds lam/(1+lam)^2 * |f'(z0)| r and lam/(1-lam)^2 * |f'(z0)| r for
    |f(z) - f(z0)|. With r = 1 the numbers are the two coefficients times deriv.

    Raises:
        ValueError: If lam is outside (0, 1) or deriv, r are not positive
    """
    _check_lambda(lam)
    if deriv <= 0 or r <= 0:
        raise ValueError(f"Derivative and radius must be positive, got {deriv}, {r}")
    scale = deriv * r
    return lam / (1.0 + lam) ** 2 * scale, lam / (1.0 - lam) ** 2 * scale


def koebe_derivative_bounds(deriv: float, lam: float) -> Tuple[float, float]:
    """Bounds (1-lam)/(1+lam)^3 and (1+lam)/(1-lam)^3 times |f'(z0)| for |f'(z)|."""
    _check_lambda(lam)
    if deriv <= 0:
        raise ValueError(f"Derivative must be positive, got {deriv}")
    return (1.0 - lam) / (1.0 + lam) ** 3 * deriv, (1.0 + lam) / (1.0 - lam) ** 3 * deriv


def koebe_quarter(image_center: complex, deriv: float, r: float) -> Disk:
    """The disk D(f(z0), |f'(z0)| r / 4) covered by a univalent f on D(z0, r)."""
    if deriv <= 0:
        raise ValueError(f"Derivative must be positive, got {deriv}")
    return Disk(complex(image_center), deriv * r / 4.0)


def component_bounds(
    p: PoleDatum, escape_radius: float, m: Optional[ModelFunction] = None
) -> CoverComponent:
    """
    Inner and outer radii |b|/(4 sqrt R) and 2|b|/sqrt R around the pole ``p``.

    When the model is given, an escape radius below four times its singular-value
    bound is reported as a warning.
    """
    if escape_radius <= 0:
        raise ValueError(f"Escape radius must be positive, got {escape_radius}")
    if m is not None:
        floor = minimum_escape_radius(m)
        if escape_radius < floor:
            logger.warning(
                f"Escape radius {escape_radius:g} is below the minimum {floor:g} for {m.variant}"
            )
    root = math.sqrt(escape_radius)
    b = p.coefficient
    return CoverComponent(
        pole=p.location,
        coefficient=b,
        escape_radius=escape_radius,
        inner_radius=b / (4.0 * root),
        outer_radius=2.0 * b / root,
    )


def branch_derivative_bound(b: float, z_mod: float, c1: float = DEFAULT_C1) -> float:
    """C1 |b| / |z|^(3/2)."""
    if z_mod <= 0:
        raise ValueError(f"Modulus must be positive, got {z_mod}")
    return c1 * abs(b) / z_mod**1.5


def local_inverse_branch(p: PoleDatum, w: np.ndarray, b: Optional[complex] = None) -> np.ndarray:
    """
    Inverse branch a + b/sqrt(w) of the local model (b/(z - a))^2.

    ``b`` defaults to the positive real coefficient |b|; the principal root is used.
    """
    coefficient = p.coefficient if b is None else b
    w = np.asarray(w, dtype=complex)
    return p.location + coefficient / np.sqrt(w)


def local_inverse_derivative(b: complex, w: np.ndarray) -> np.ndarray:
    """Derivative -b/(2 w^(3/2)) of the local inverse branch."""
    w = np.asarray(w, dtype=complex)
    return -b / (2.0 * w * np.sqrt(w))


def chain_diameter(chain: BranchChain, escape_radius: float) -> Tuple[float, float]:
    """
    Diameter bounds for the image of a composed inverse branch.

    euclidean = C1^(l-1) (4/sqrt R) |b_1| prod_{k>=2} |b_k|/|a_k|^(3/2)
    spherical = C1^(l-1) (32/sqrt R) prod_{k>=1} |b_k|/|a_k|^(3/2)

    Raises:
        ValueError: If any pole of the chain lies inside D(0, R)
    """
    moduli = np.abs(np.asarray(chain.poles))
    if np.any(moduli < escape_radius):
        raise ValueError("chain leaves B(R)")
    b = np.asarray(chain.coefficients)
    ratios = b / moduli**1.5
    root = math.sqrt(escape_radius)
    scale = chain.c1 ** (len(chain) - 1)
    euclidean = scale * (4.0 / root) * b[0] * float(np.prod(ratios[1:]))
    spherical = scale * (32.0 / root) * float(np.prod(ratios))
    return euclidean, spherical


def chain_normalization(chain: BranchChain, escape_radius: float) -> float:
    """Factor with spherical(c1 + c2) = spherical(c1) spherical(c2) times this value."""
    return chain.c1 * math.sqrt(escape_radius) / 32.0
