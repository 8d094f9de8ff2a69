"""
Model Functions
===============
The catalog of Speiser-class model maps built from Weierstrass p-functions:

- PlainWp:       z -> p(z), order 2
- WpExp:         z -> p(e^z + c), infinite order
- WpCosh:        z -> p(arccosh z), order 0, poles at cosh(m)
- WpPower:       z -> p(z^(rho/2) + c), order rho in (0, 2]
- PowerLift:     z -> inner(z^N)
- GluedOrderTwo: p1 on the upper half-plane glued to p2 on the lower one

Every single-lattice model is p composed with an inner map psi. Poles are found by
pulling lattice points back through psi, and each pole a carries the leading
coefficient |b| = 1/|psi'(a)|, so that f(z)(z - a)^2 -> b^2.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from speiser_escape.elliptic import (
    EllipticFunction,
    Lattice,
    critical_values,
    lattice_points_in_disk,
    solve_wp,
)
from speiser_escape.interpolation import InterpolationStack
from speiser_escape.sphere_geometry import INFINITY, chordal_distance, normalize_extended

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Inner-map arguments beyond this modulus are not trusted in double precision.
ARGUMENT_LIMIT = 1e13

ArrayLike = Union[complex, np.ndarray]


class Branch(str, Enum):
    """Branch of the power map on the negative real axis."""

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class PoleDatum:
    """A pole a_j with multiplicity and leading coefficient |b_j|."""

    location: complex
    multiplicity: int
    coefficient: float
    lattice_point: complex
    approximate: bool = False


@dataclass(frozen=True)
class PoleInventory:
    """Poles in a closed disk, sorted by modulus then argument."""

    radius: float
    locations: np.ndarray
    multiplicities: np.ndarray
    coefficients: np.ndarray
    lattice_points: np.ndarray
    approximate: np.ndarray

    def __len__(self) -> int:
        return int(self.locations.size)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.locations)

    def within(self, r: float) -> "PoleInventory":
        if r > self.radius:
            raise ValueError(f"Inventory covers radius {self.radius}, asked for {r}")
        keep = self.moduli <= r
        return PoleInventory(
            r,
            self.locations[keep],
            self.multiplicities[keep],
            self.coefficients[keep],
            self.lattice_points[keep],
            self.approximate[keep],
        )

    def data(self) -> List[PoleDatum]:
        return [
            PoleDatum(complex(a), int(m), float(b), complex(lam), bool(flag))
            for a, m, b, lam, flag in zip(
                self.locations,
                self.multiplicities,
                self.coefficients,
                self.lattice_points,
                self.approximate,
            )
        ]


@dataclass(frozen=True)
class EvalResult:
    """Values on the sphere plus the seam and precision masks."""

    values: np.ndarray
    seam: np.ndarray
    resolved: np.ndarray


@dataclass(frozen=True)
class Preimages:
    """Points z with psi(z) in a shifted lattice, the lattice points hit and branch-point flags."""

    points: np.ndarray
    lattice_points: np.ndarray
    branch_point: np.ndarray

    @classmethod
    def empty(cls) -> "Preimages":
        return cls(np.empty(0, complex), np.empty(0, complex), np.empty(0, bool))


def _sorted_inventory(
    radius: float,
    locations: np.ndarray,
    multiplicities: np.ndarray,
    coefficients: np.ndarray,
    lattice_points: np.ndarray,
    approximate: np.ndarray,
) -> PoleInventory:
    order = np.lexsort((np.angle(locations), np.abs(locations)))
    return PoleInventory(
        radius,
        locations[order],
        multiplicities[order].astype(int),
        coefficients[order],
        lattice_points[order],
        approximate[order].astype(bool),
    )


def default_shift(lattice: Lattice) -> complex:
    """The shift (w1 + w2)/4, never a lattice point or half period."""
    return (lattice.omega1 + lattice.omega2) / 4


def validate_shift(c: complex, lattice: Lattice) -> complex:
    """
    Ensure ``c`` is neither a lattice point nor a half period.

    Raises:
        ValueError: If c or 2c lies in the lattice
    """
    c = complex(c)
    if lattice.contains(2 * c, tol=1e-9):
        raise ValueError(f"Shift {c} is a lattice point or half period")
    return c


class ModelFunction(ABC):
    """Common interface of the model catalog."""

    variant: str = ""

    @property
    @abstractmethod
    def elliptic(self) -> EllipticFunction:
        ...

    @abstractmethod
    def evaluate(self, z: ArrayLike) -> EvalResult:
        ...

    @abstractmethod
    def pole_inventory(self, radius: float) -> PoleInventory:
        ...

    @abstractmethod
    def singular_values(self) -> List[complex]:
        """Finite singular values (critical and asymptotic)."""

    def poles_in_disk(self, radius: float) -> List[PoleDatum]:
        return self.pole_inventory(radius).data()

    def __call__(self, z: ArrayLike) -> ArrayLike:
        values = self.evaluate(z).values
        return complex(values[()]) if np.ndim(values) == 0 else values


class CompositeModel(ModelFunction):
    """p composed with an inner map psi."""

    @abstractmethod
    def inner(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return (psi(z), psi'(z), resolved, seam) for an array of points."""

    @abstractmethod
    def preimages(self, shift: complex, radius: float) -> Preimages:
        """All z with |z| <= radius and psi(z) in shift + lattice."""

    def evaluate(self, z: ArrayLike) -> EvalResult:
        za = np.asarray(z, dtype=complex)
        shape = za.shape
        w, dw, resolved, seam = self.inner(za.ravel())
        f = self.elliptic
        with np.errstate(invalid="ignore", over="ignore"):
            eps = f.eps_pole * np.where(np.isfinite(dw), np.abs(dw), 0.0)
        values, _, ok = f.evaluate(w, eps=eps)
        return EvalResult(
            values=values.reshape(shape),
            seam=seam.reshape(shape),
            resolved=(resolved & ok).reshape(shape),
        )

    def pole_inventory(self, radius: float) -> PoleInventory:
        if radius <= 0:
            raise ValueError(f"Radius must be positive, got {radius}")
        pre = self.preimages(0j, radius)
        _, dw, _, _ = self.inner(pre.points)
        with np.errstate(divide="ignore", invalid="ignore"):
            coefficients = np.where(pre.branch_point, 0.5, 1.0 / np.abs(dw))
        multiplicities = np.where(pre.branch_point, 1, 2)
        logger.debug(f"{self.variant}: {pre.points.size} poles within radius {radius:g}")
        return _sorted_inventory(
            radius,
            pre.points,
            multiplicities,
            coefficients,
            pre.lattice_points,
            np.zeros(pre.points.size, dtype=bool),
        )

    def level_points(self, a: complex, radius: float) -> np.ndarray:
        """Solutions of f(z) = a in the closed disk of the given radius."""
        roots = solve_wp(self.elliptic, a)
        found = [self.preimages(complex(u), radius).points for u in roots]
        points = np.concatenate(found)
        return points[np.lexsort((np.angle(points), np.abs(points)))]

    def singular_values(self) -> List[complex]:
        return list(critical_values(self.elliptic).values)


@dataclass(frozen=True)
class PlainWp(CompositeModel):
    f: EllipticFunction
    variant: str = field(default="plain", init=False)

    @property
    def elliptic(self) -> EllipticFunction:
        return self.f

    def inner(self, z):
        z = np.asarray(z, dtype=complex)
        ones = np.ones(z.shape, dtype=complex)
        return z, ones, np.isfinite(z), np.zeros(z.shape, dtype=bool)

    def preimages(self, shift, radius):
        lam = lattice_points_in_disk(self.f.lattice, -shift, radius)
        return Preimages(lam + shift, lam, np.zeros(lam.size, dtype=bool))


@dataclass(frozen=True)
class WpExp(CompositeModel):
    """z -> p(e^z + c)."""

    f: EllipticFunction
    c: Optional[complex] = None
    variant: str = field(default="wp_exp", init=False)

    def __post_init__(self):
        c = default_shift(self.f.lattice) if self.c is None else self.c
        object.__setattr__(self, "c", validate_shift(c, self.f.lattice))

    @property
    def elliptic(self) -> EllipticFunction:
        return self.f

    def inner(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(z)
        resolved = np.isfinite(e) & (np.abs(z) <= ARGUMENT_LIMIT)
        return e + self.c, e, resolved, np.zeros(z.shape, dtype=bool)

    def preimages(self, shift, radius):
        outer = math.exp(radius)
        lam = lattice_points_in_disk(self.f.lattice, self.c - shift, outer)
        mu = lam + shift - self.c
        keep = (np.abs(mu) >= math.exp(-radius)) & (mu != 0)
        lam, mu = lam[keep], mu[keep]
        if lam.size == 0:
            return Preimages.empty()

        ell = np.log(np.abs(mu))
        theta = np.angle(mu)
        half = np.sqrt(np.maximum(radius**2 - ell**2, 0.0))
        k_lo = np.ceil((-half - theta) / TWO_PI).astype(np.int64)
        k_hi = np.floor((half - theta) / TWO_PI).astype(np.int64)
        counts = np.maximum(k_hi - k_lo + 1, 0)

        index = np.repeat(np.arange(lam.size), counts)
        starts = np.repeat(k_lo, counts)
        offsets = np.arange(index.size) - np.repeat(np.cumsum(counts) - counts, counts)
        k = starts + offsets
        z = ell[index] + 1j * (theta[index] + TWO_PI * k)
        inside = np.abs(z) <= radius
        return Preimages(z[inside], lam[index][inside], np.zeros(int(inside.sum()), dtype=bool))

    def singular_values(self):
        asymptotic = complex(self.f.evaluate(np.array([self.c]))[0][0])
        return super().singular_values() + [asymptotic]


@dataclass(frozen=True)
class WpCosh(CompositeModel):
    """
    z -> p(phi(z)) with phi(z) = log(z + sqrt(z-1) sqrt(z+1)) onto the half-strip
    {Re w > 0, |Im w| < pi}. The lattice must be (w1, 2 pi i) with w1 > 0.

    Values on (-inf, 1] agree from both sides, so the cut needs no special case.
    """

    f: EllipticFunction
    variant: str = field(default="wp_cosh", init=False)

    def __post_init__(self):
        lat = self.f.lattice
        if abs(lat.omega2 - TWO_PI * 1j) > 1e-12 * TWO_PI or abs(lat.omega1.imag) > 1e-12 or lat.omega1.real <= 0:
            raise ValueError("WpCosh needs the lattice (w1, 2*pi*i) with w1 > 0")

    @classmethod
    def standard(cls, **kwargs) -> "WpCosh":
        return cls(EllipticFunction(Lattice(1.0, TWO_PI * 1j), **kwargs))

    @property
    def elliptic(self) -> EllipticFunction:
        return self.f

    def inner(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.sqrt(z - 1.0) * np.sqrt(z + 1.0)
            w = np.log(z + root)
            dw = 1.0 / root
        resolved = np.isfinite(w) & (np.abs(z) <= ARGUMENT_LIMIT)
        return w, dw, resolved, np.zeros(z.shape, dtype=bool)

    def preimages(self, shift, radius):
        reach = math.asinh(radius)
        bound = math.hypot(reach, math.pi) + 1.0
        lam = lattice_points_in_disk(self.f.lattice, -shift, bound)
        w = lam + shift
        tol = 1e-12
        keep = (w.real >= -tol) & (w.real <= reach + tol)
        keep &= (w.imag <= math.pi + tol) & (w.imag > -math.pi + tol)
        # cosh(w) = cosh(-w): on the imaginary edge keep the upper half only.
        keep &= ~((np.abs(w.real) <= tol) & (w.imag < -tol))
        lam, w = lam[keep], w[keep]
        z = np.cosh(w)
        inside = np.abs(z) <= radius
        branch = np.abs(w) <= tol
        return Preimages(z[inside], lam[inside], branch[inside])


@dataclass(frozen=True)
class WpPower(CompositeModel):
    """
    z -> p(h(z) + c) with h(z) = z^(rho/2).

    On the negative real axis the plus branch takes arg z = pi and the minus branch
    arg z = -pi; the model is discontinuous there and the seam mask is set.
    """

    f: EllipticFunction
    rho: float
    c: Optional[complex] = None
    branch: Branch = Branch.PLUS
    variant: str = field(default="wp_power", init=False)

    def __post_init__(self):
        if not 0.0 < self.rho <= 2.0:
            raise ValueError(f"Power-map order must lie in (0, 2], got {self.rho}")
        c = default_shift(self.f.lattice) if self.c is None else self.c
        object.__setattr__(self, "c", validate_shift(c, self.f.lattice))
        object.__setattr__(self, "branch", Branch(self.branch))

    @property
    def elliptic(self) -> EllipticFunction:
        return self.f

    @property
    def half_opening(self) -> float:
        """Half the opening of the image sector, rho * pi / 2."""
        return self.rho * math.pi / 2.0

    def inner(self, z):
        z = np.asarray(z, dtype=complex)
        resolved = np.isfinite(z) & (np.abs(z) <= ARGUMENT_LIMIT)
        if self.rho == 2.0:
            return z + self.c, np.ones(z.shape, dtype=complex), resolved, np.zeros(z.shape, dtype=bool)

        seam = (z.imag == 0) & (z.real < 0)
        arg = np.angle(z)
        arg = np.where(seam, math.pi if self.branch is Branch.PLUS else -math.pi, arg)
        p = self.rho / 2.0
        h = np.abs(z) ** p * np.exp(1j * p * arg)
        with np.errstate(divide="ignore", invalid="ignore"):
            dh = np.where(z == 0, 0.0, p * h / z)
        return h + self.c, dh, resolved, seam

    def preimages(self, shift, radius):
        reach = radius ** (self.rho / 2.0)
        lam = lattice_points_in_disk(self.f.lattice, self.c - shift, reach)
        mu = lam + shift - self.c
        if self.rho == 2.0:
            return Preimages(mu, lam, np.zeros(mu.size, dtype=bool))

        arg = np.angle(mu)
        edge = self.half_opening
        tol = 1e-12
        on_upper = np.abs(arg - edge) <= tol
        on_lower = np.abs(arg + edge) <= tol
        keep = (np.abs(arg) < edge - tol) & (mu != 0)
        keep |= on_upper if self.branch is Branch.PLUS else on_lower
        mu, lam, arg = mu[keep], lam[keep], arg[keep]
        q = 2.0 / self.rho
        z = np.abs(mu) ** q * np.exp(1j * q * arg)
        inside = np.abs(z) <= radius
        return Preimages(z[inside], lam[inside], np.zeros(int(inside.sum()), dtype=bool))

    def singular_values(self):
        values = super().singular_values()
        if self.rho < 2.0:
            values.append(complex(self.f.evaluate(np.array([self.c]))[0][0]))
        return values

    def seam_residual(self, samples: Sequence[float]) -> float:
        """Max chordal jump between the two branch values on the negative real axis."""
        x = np.asarray(samples, dtype=float)
        if np.any(x >= 0):
            raise ValueError("Seam samples must be negative reals")
        plus = WpPower(self.f, self.rho, self.c, Branch.PLUS)
        minus = WpPower(self.f, self.rho, self.c, Branch.MINUS)
        return float(np.max(chordal_distance(plus(x + 0j), minus(x + 0j))))


@dataclass(frozen=True)
class PowerLift(CompositeModel):
    """z -> inner(z^N)."""

    base: CompositeModel
    n: int
    variant: str = field(default="power_lift", init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"Lift exponent must be a positive integer, got {self.n}")

    @classmethod
    def for_order(
        cls,
        rho: float,
        f: EllipticFunction,
        c: Optional[complex] = None,
        branch: Branch = Branch.PLUS,
    ) -> "PowerLift":
        """
        Model of order ``rho`` >= 1: N = floor(rho) and an inner power map of order
        rho / N in [1, 2).
        """
        if rho < 1.0:
            raise ValueError(f"Lifted order must be at least 1, got {rho}")
        n = int(math.floor(rho))
        return cls(WpPower(f, rho / n, c, branch), n)

    @property
    def elliptic(self) -> EllipticFunction:
        return self.base.elliptic

    def inner(self, z):
        z = np.asarray(z, dtype=complex)
        zn = z**self.n
        w, dw, resolved, seam = self.base.inner(zn)
        chain = dw * self.n * z ** (self.n - 1)
        return w, chain, resolved, seam

    def preimages(self, shift, radius):
        pre = self.base.preimages(shift, radius**self.n)
        if pre.points.size == 0:
            return pre
        k = np.arange(self.n)
        modulus = np.abs(pre.points) ** (1.0 / self.n)
        angle = np.angle(pre.points)
        roots = modulus[:, None] * np.exp(1j * (angle[:, None] + TWO_PI * k[None, :]) / self.n)
        lam = np.repeat(pre.lattice_points, self.n)
        branch = np.repeat(pre.branch_point, self.n)
        roots = roots.ravel()
        inside = np.abs(roots) <= radius
        return Preimages(roots[inside], lam[inside], branch[inside])

    def singular_values(self):
        values = self.base.singular_values()
        if self.n > 1:
            values.append(complex(self.base.evaluate(np.array([0j])).values[0]))
        return values


@dataclass(frozen=True, eq=False)
class GluedOrderTwo(ModelFunction):
    """
    G(z) = p1(H1(z) + c1) for Im z >= 0 and p2(conj H2(conj z) + c2) for Im z < 0,
    where H_i are the stack maps of the interpolation stacks. Both lattices must
    contain the horizontal period 1.
    """

    upper: EllipticFunction
    lower: EllipticFunction
    h1: InterpolationStack
    h2: InterpolationStack
    c1: Optional[complex] = None
    c2: Optional[complex] = None
    variant: str = field(default="glued", init=False)

    def __post_init__(self):
        for f in (self.upper, self.lower):
            if not f.lattice.contains(1.0):
                raise ValueError(f"Lattice {f.lattice} does not have the horizontal period 1")
        c1 = default_shift(self.upper.lattice) if self.c1 is None else self.c1
        c2 = complex(c1).conjugate() if self.c2 is None else self.c2
        object.__setattr__(self, "c1", validate_shift(c1, self.upper.lattice))
        object.__setattr__(self, "c2", validate_shift(c2, self.lower.lattice))

    @property
    def elliptic(self) -> EllipticFunction:
        return self.upper

    def upper_value(self, z: np.ndarray) -> np.ndarray:
        return self.upper.evaluate(self.h1.stack_map(z) + self.c1)[0]

    def lower_value(self, z: np.ndarray) -> np.ndarray:
        w = np.conj(self.h2.stack_map(np.conj(z))) + self.c2
        return self.lower.evaluate(w)[0]

    def evaluate(self, z: ArrayLike) -> EvalResult:
        za = np.asarray(z, dtype=complex)
        shape = za.shape
        flat = za.ravel()
        up = flat.imag >= 0
        values = np.full(flat.shape, INFINITY, dtype=complex)
        resolved = np.ones(flat.shape, dtype=bool)
        if np.any(up):
            w = self.h1.stack_map(flat[up]) + self.c1
            values[up], _, resolved[up] = self.upper.evaluate(w)
        if np.any(~up):
            w = np.conj(self.h2.stack_map(np.conj(flat[~up]))) + self.c2
            values[~up], _, resolved[~up] = self.lower.evaluate(w)
        return EvalResult(
            normalize_extended(values).reshape(shape),
            np.zeros(shape, dtype=bool),
            resolved.reshape(shape),
        )

    def _half_inventory(
        self, f: EllipticFunction, stack: InterpolationStack, c: complex, radius: float, mirror: bool
    ):
        margin = (
            max(stack.chi1.displacement_bound, stack.chi2.displacement_bound)
            + abs(stack.height - stack.depth)
            + abs(c)
            + 1.0
        )
        lam = lattice_points_in_disk(f.lattice, 0j, radius + margin)
        w = lam - c
        if mirror:
            w = np.conj(w)
            keep = w.imag > 0
        else:
            keep = w.imag >= 0
        lam, w = lam[keep], w[keep]
        z = stack.stack_inverse(w) if w.size else w
        jac = stack.stack_jacobian(z) if w.size else np.empty(0)
        approximate = w.imag < stack.height
        if mirror:
            z = np.conj(z)
        inside = np.abs(z) <= radius
        return z[inside], lam[inside], 1.0 / np.sqrt(jac[inside]), approximate[inside]

    def pole_inventory(self, radius: float) -> PoleInventory:
        if radius <= 0:
            raise ValueError(f"Radius must be positive, got {radius}")
        z1, l1, b1, a1 = self._half_inventory(self.upper, self.h1, self.c1, radius, False)
        z2, l2, b2, a2 = self._half_inventory(self.lower, self.h2, self.c2, radius, True)
        z = np.concatenate([z1, z2])
        if np.any(np.concatenate([a1, a2])):
            logger.debug("Glued model has poles inside the surgery strips (approximate locations)")
        return _sorted_inventory(
            radius,
            z,
            np.full(z.size, 2),
            np.concatenate([b1, b2]),
            np.concatenate([l1, l2]),
            np.concatenate([a1, a2]),
        )

    def singular_values(self):
        return list(critical_values(self.upper).values) + list(critical_values(self.lower).values)


def evaluate(m: ModelFunction, z: ArrayLike) -> EvalResult:
    """Evaluate a model on the sphere (INFINITY at and near poles)."""
    return m.evaluate(z)


def poles_in_disk(m: ModelFunction, radius: float) -> List[PoleDatum]:
    """Exact pole inventory of ``m`` in the closed disk, sorted by (|a|, arg a)."""
    return m.poles_in_disk(radius)


def inner_derivative(m: ModelFunction, z: complex) -> complex:
    """psi'(z) of a composite model; for the glued skeleton the square root of the Jacobian."""
    if isinstance(m, CompositeModel):
        _, dw, _, _ = m.inner(np.array([z], dtype=complex))
        return complex(dw[0])
    if isinstance(m, GluedOrderTwo):
        if z.imag >= 0:
            return complex(math.sqrt(float(m.h1.stack_jacobian(np.array([z]))[0])))
        return complex(math.sqrt(float(m.h2.stack_jacobian(np.array([np.conj(z)]))[0])))
    raise ValueError(f"Unsupported model {type(m).__name__}")


def leading_coefficient(m: ModelFunction, p: PoleDatum) -> float:
    """
    |b| = 1/|psi'(a)| for a double pole a.

    Raises:
        ValueError: If psi' vanishes or is infinite at the pole
    """
    if p.multiplicity == 1:
        return p.coefficient
    d = inner_derivative(m, p.location)
    if not np.isfinite(d) or abs(d) == 0.0:
        raise ValueError("degenerate pole")
    return 1.0 / abs(d)


def local_expansion_error(m: CompositeModel, p: PoleDatum, distance: Optional[float] = None) -> float:
    """
    Relative deviation of f(z)(z-a)^2 from b^2 = psi'(a)^-2.

    The product is averaged over four approach directions, which cancels the
    first-order correction.
    """
    d = inner_derivative(m, p.location)
    target = 1.0 / d**2
    delta = (1e-4 * p.coefficient) if distance is None else distance
    steps = delta * np.array([1, 1j, -1, -1j])
    values = m.evaluate(p.location + steps).values
    if not np.all(np.isfinite(values)):
        raise ValueError(f"Sampling distance {delta:g} falls inside the pole threshold")
    mean = np.mean(values * steps**2)
    return float(abs(mean - target) / abs(target))


def gluing_residual(m: GluedOrderTwo, samples: Sequence[float]) -> float:
    """
    Max chordal mismatch on the real axis between p1(H1(x) + c1) and
    p2(H2(x) + c2). Zero exactly when the boundary data match.
    """
    x = np.asarray(samples, dtype=float) + 0j
    upper = m.upper_value(x)
    lower = m.lower_value(x)
    return float(np.max(chordal_distance(upper, lower)))


def singular_values(m: ModelFunction) -> List[complex]:
    return m.singular_values()


def minimum_escape_radius(m: ModelFunction) -> float:
    """Four times the largest finite singular value modulus."""
    values = np.array([v for v in m.singular_values() if np.isfinite(v)], dtype=complex)
    return 4.0 * float(np.max(np.abs(values))) if values.size else 0.0

