"""
Weierstrass Elliptic Functions
==============================
Evaluation of the Weierstrass p-function and its derivative over arbitrary
lattices, lattice reduction, Eisenstein invariants, critical values and
lattice-point enumeration.

Evaluation works in the Gauss-reduced basis (1, tau) of the lattice, after
reduction to the centered cell. Lattice points are grouped into shells
k = max(ceil(|m| / a), |n|) of the rectangle |m| <= a*k, |n| <= k, with the
aspect a ~ Im tau so shells are roughly round. Symmetrized pairs +-w are summed
directly for k <= M; the shells beyond M enter through the Laurent expansion

    sum_{k > M} [(u - w)^-2 - w^-2] = sum_i (2i + 1) T_{2i+2}(M) u^(2i)

where T_p(M) are tail Eisenstein sums. Those are summed directly up to 8M shells
and the remainder is extrapolated from the shell asymptotics
S_k = k^(1-p) (c0 + c1/k + ...) with Hurwitz zeta tails.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import zeta

from speiser_escape.config import settings
from speiser_escape.sphere_geometry import INFINITY, normalize_extended

logger = logging.getLogger(__name__)

PI = math.pi

# Arguments farther than this many cell diameters from the origin cannot be reduced
# to the fundamental cell reliably in double precision.
REDUCTION_LIMIT = 1e9

# Neighbour offsets checked when picking the smallest representative.
_OFFSETS = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))

ArrayLike = Union[complex, np.ndarray]


def _gauss_reduce(w1: complex, w2: complex) -> Tuple[complex, complex]:
    """Gauss-reduce a positively oriented basis, keeping the orientation."""
    for _ in range(200):
        if abs(w2) < abs(w1):
            w1, w2 = w2, -w1
        k = round((w2 / w1).real)
        w2 = w2 - k * w1
        if abs(w2) >= abs(w1):
            break
    return w1, w2


# Shells summed directly per truncation shell before the remainder is extrapolated.
OUTER_SHELLS = 8

# Polynomial degree of the shell asymptotics fit.
REMAINDER_DEGREE = 5

# Cap on the number of Laurent tail terms.
MAX_TAIL_TERMS = 40


def _shell_grid(tau: complex, aspect: int, shells: int) -> Tuple[np.ndarray, ...]:
    """Nonzero points m + n*tau of shells 1..shells with their shell index and indices."""
    m, n = np.meshgrid(np.arange(-aspect * shells, aspect * shells + 1), np.arange(-shells, shells + 1))
    m, n = m.ravel(), n.ravel()
    k = np.maximum(-(-np.abs(m) // aspect), np.abs(n))
    keep = k > 0
    return m[keep] + n[keep] * tau, k[keep], m[keep], n[keep]


def _shell_sums(w: np.ndarray, k: np.ndarray, shells: int, power: int) -> np.ndarray:
    """Per-shell sums of w^-power; index 0 is the empty origin shell."""
    terms = w ** (-power)
    return np.bincount(k, weights=terms.real, minlength=shells + 1) + 1j * np.bincount(
        k, weights=terms.imag, minlength=shells + 1
    )


def _shell_remainder(sums: np.ndarray, power: int) -> complex:
    """
    Sum of all shells beyond the last one in ``sums``.

    Fits k^(power-1) S_k as a polynomial in 1/k over the outer half of the shells
    and sums each power of k exactly with the Hurwitz zeta function.
    """
    shells = len(sums) - 1
    ks = np.arange(shells // 2, shells + 1)
    scaled = sums[ks] * ks.astype(float) ** (power - 1)
    x = shells / ks
    coef = npoly.polyfit(x, scaled.real, REMAINDER_DEGREE) + 1j * npoly.polyfit(
        x, scaled.imag, REMAINDER_DEGREE
    )
    degrees = np.arange(REMAINDER_DEGREE + 1)
    tails = float(shells) ** degrees * zeta(power - 1 + degrees, shells + 1)
    return complex(np.sum(coef * tails))


@dataclass(frozen=True)
class LatticeSums:
    """
    Direct lattice sums of the normalized lattice (1, tau) at truncation M.

    ``inner`` holds one point of each +-pair in shells 1..M. ``tails[i]`` is the
    sum of w^-(2i+4) over every shell beyond M.
    """

    tau: complex
    truncation: int
    inner: np.ndarray
    g4: complex
    g6: complex
    tails: np.ndarray


def lattice_sums(tau: complex, truncation: int, terms: Optional[int] = None) -> LatticeSums:
    """
    Eisenstein sums G4, G6 and the tail sums beyond ``truncation`` shells.

    Args:
        tau: Period ratio of a Gauss-reduced basis
        truncation: Shell count M summed pairwise by the evaluator
        terms: Number of tail sums; by default enough that the neglected Laurent
            terms fall below rounding anywhere in the centered cell

    Returns:
        LatticeSums of the lattice (1, tau)
    """
    aspect = max(1, round(tau.imag))
    shells = OUTER_SHELLS * truncation
    w, k, m, n = _shell_grid(tau, aspect, shells)
    inside = k <= truncation
    half = inside & ((n > 0) | ((n == 0) & (m > 0)))

    if terms is None:
        cell_radius = math.hypot(0.5, tau.imag / 2)
        ratio = cell_radius / float(np.min(np.abs(w[~inside])))
        terms = min(MAX_TAIL_TERMS, max(2, math.ceil(17 * math.log(10) / (-2 * math.log(ratio)))))

    full = {}
    tails = np.empty(terms, dtype=complex)
    for i, power in enumerate(range(4, 2 * terms + 3, 2)):
        sums = _shell_sums(w, k, shells, power)
        rest = _shell_remainder(sums, power)
        tails[i] = sums[truncation + 1 :].sum() + rest
        if power <= 6:
            full[power] = complex(sums.sum() + rest)

    logger.debug(
        f"Lattice sums for tau={tau}: M={truncation}, aspect={aspect}, "
        f"{int(half.sum())} pairs, {terms} tail terms"
    )
    return LatticeSums(
        tau=tau, truncation=truncation, inner=w[half], g4=full[4], g6=full[6], tails=tails
    )


@dataclass(frozen=True)
class Lattice:
    """
    Rank-2 lattice spanned by omega1, omega2.

    The orientation is normalized at construction so that Im(omega2/omega1) > 0.
    Eisenstein invariants g2, g3 are computed eagerly and cached.
    """

    omega1: complex
    omega2: complex
    tau: complex = field(init=False, repr=False, compare=False)
    area: float = field(init=False, repr=False, compare=False)
    diameter: float = field(init=False, repr=False, compare=False)
    reduced: Tuple[complex, complex] = field(init=False, repr=False, compare=False)
    g2: complex = field(init=False, repr=False, compare=False)
    g3: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w1, w2 = complex(self.omega1), complex(self.omega2)
        if w1 == 0 or w2 == 0:
            raise ValueError("Lattice generators must be nonzero")
        ratio = w2 / w1
        if abs(ratio.imag) < 1e-12 * abs(ratio):
            raise ValueError(f"Generators {w1} and {w2} are collinear")
        if ratio.imag < 0:
            w2 = -w2
        object.__setattr__(self, "omega1", w1)
        object.__setattr__(self, "omega2", w2)
        object.__setattr__(self, "tau", w2 / w1)
        object.__setattr__(self, "area", abs((w1.conjugate() * w2).imag))
        object.__setattr__(self, "diameter", max(abs(w1 + w2), abs(w1 - w2)))

        r1, r2 = _gauss_reduce(w1, w2)
        object.__setattr__(self, "reduced", (r1, r2))
        g2, g3 = self.invariants(settings.truncation_order)
        object.__setattr__(self, "g2", g2)
        object.__setattr__(self, "g3", g3)
        logger.debug(f"Lattice ({w1}, {w2}) reduced to ({r1}, {r2}), g2={self.g2}, g3={self.g3}")

    def invariants(self, truncation: int) -> Tuple[complex, complex]:
        """g2 = 60 G4 and g3 = 140 G6 by direct summation over 8 * ``truncation`` shells."""
        r1, r2 = self.reduced
        sums = lattice_sums(r2 / r1, truncation, terms=2)
        return 60.0 * sums.g4 / r1**4, 140.0 * sums.g6 / r1**6

    @property
    def half_periods(self) -> Tuple[complex, complex, complex]:
        """Half periods in the order w1/2, (w1+w2)/2, w2/2."""
        return self.omega1 / 2, (self.omega1 + self.omega2) / 2, self.omega2 / 2

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        """True when ``z`` is a lattice point up to ``tol`` cell diameters."""
        z0, _ = reduce_to_fundamental(z, self)
        return abs(z0) <= tol * self.diameter

    def conjugate(self) -> "Lattice":
        """The mirror lattice spanned by the conjugate generators."""
        return Lattice(self.omega1.conjugate(), self.omega2.conjugate())


def lattice_with_opening(alpha: float, omega1: complex = 1.0) -> Lattice:
    """
    Lattice (w1, w1*tau) with |tau| = 1 and arg tau = alpha / 2.

    This is the lattice the power-map construction pairs with the sector of
    opening ``alpha`` = rho * pi.
    """
    if not 0.0 < alpha < 2.0 * PI:
        raise ValueError(f"Opening angle must lie in (0, 2*pi), got {alpha}")
    return Lattice(omega1, omega1 * complex(math.cos(alpha / 2), math.sin(alpha / 2)))


@dataclass(frozen=True)
class EllipticFunction:
    """
    The Weierstrass p-function of a lattice.

    Args:
        lattice: Period lattice
        truncation: Shell count M (>= 8) summed pairwise
        eps_pole: Distance below which a point counts as a pole
            (defaults to 1e-8 cell diameters)
    """

    lattice: Lattice
    truncation: int = field(default_factory=lambda: settings.truncation_order)
    eps_pole: Optional[float] = None
    sums: LatticeSums = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.truncation < 8:
            raise ValueError(f"Truncation order must be at least 8, got {self.truncation}")
        if self.eps_pole is None:
            object.__setattr__(self, "eps_pole", 1e-8 * self.lattice.diameter)
        if not self.eps_pole > 0:
            raise ValueError(f"Pole threshold must be positive, got {self.eps_pole}")
        w1, w2 = self.lattice.reduced
        object.__setattr__(self, "sums", lattice_sums(w2 / w1, self.truncation))

    def _reduced_coordinates(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Reduce z into the centered cell of the reduced basis; return u and pole distance."""
        w1, w2 = self.lattice.reduced
        tau = w2 / w1
        u = z / w1
        u = u - np.rint(u.imag / tau.imag) * tau
        u = u - np.rint(u.real)
        dist = np.full(u.shape, np.inf)
        for a, b in _OFFSETS:
            dist = np.minimum(dist, np.abs(u - a - b * tau))
        return u, dist * abs(w1)

    def evaluate(
        self, z: ArrayLike, eps: Optional[ArrayLike] = None
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Values of p and p' with the precision mask.

        Args:
            z: Points to evaluate
            eps: Per-point pole threshold (defaults to eps_pole)

        Returns:
            Tuple (p, p', resolved); poles map to INFINITY, ``resolved`` is False
            where the argument is too large to reduce reliably
        """
        shape = np.shape(z)
        za = np.asarray(z, dtype=complex).ravel()
        threshold = self.eps_pole if eps is None else np.broadcast_to(eps, shape).ravel()

        finite = np.isfinite(za)
        resolved = finite & (np.abs(np.where(finite, za, 0)) <= REDUCTION_LIMIT * self.lattice.diameter)

        values = np.full(za.shape, INFINITY, dtype=complex)
        derivs = np.full(za.shape, INFINITY, dtype=complex)

        work = np.where(finite, za, 0.0)
        u, dist = self._reduced_coordinates(work)
        regular = finite & (dist > 0) & (dist >= threshold)
        if np.any(regular):
            p, dp = self._wp_reduced(u[regular])
            w1 = self.lattice.reduced[0]
            values[regular] = p / w1**2
            derivs[regular] = dp / w1**3

        return (
            normalize_extended(values).reshape(shape),
            normalize_extended(derivs).reshape(shape),
            resolved.reshape(shape),
        )

    def _wp_reduced(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """p_tau and p_tau' for points already in the central cell."""
        inner = self.sums.inner
        pair_shift = 2.0 / inner**2
        total = np.empty_like(u)
        total_prime = np.empty_like(u)
        block = max(1, (1 << 20) // inner.size)
        for start in range(0, u.size, block):
            v = u[start : start + block, np.newaxis]
            minus = 1.0 / (v - inner)
            plus = 1.0 / (v + inner)
            total[start : start + block] = np.sum(minus**2 + plus**2 - pair_shift, axis=1)
            total_prime[start : start + block] = np.sum(minus**3 + plus**3, axis=1)

        tails = self.sums.tails
        index = np.arange(1, tails.size + 1)
        coef = (2 * index + 1) * tails
        u2 = u * u
        tail = u2 * npoly.polyval(u2, coef)
        tail_prime = u * npoly.polyval(u2, 2 * index * coef)
        return 1.0 / u2 + total + tail, -2.0 / (u2 * u) - 2.0 * total_prime + tail_prime


def reduce_to_fundamental(z: ArrayLike, lat: Lattice) -> Tuple[ArrayLike, ArrayLike]:
    """
    Split z = z0 + lambda with lambda in the lattice and z0 in the centered cell.

    Integer rounding against the generator matrix is followed by a search over the
    nearest representatives; the smallest |z0| wins, earlier candidates on ties.

    Args:
        z: Point or array of points
        lat: Lattice

    Returns:
        Tuple (z0, lambda) of the same shape as ``z``
    """
    za = np.asarray(z, dtype=complex)
    w1, w2 = lat.omega1, lat.omega2
    basis = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
    inverse = np.linalg.inv(basis)
    s = inverse[0, 0] * za.real + inverse[0, 1] * za.imag
    t = inverse[1, 0] * za.real + inverse[1, 1] * za.imag
    m = np.rint(s)
    n = np.rint(t)

    best = za - (m * w1 + n * w2)
    best_m, best_n = m.copy(), n.copy()
    best_abs = np.abs(best)
    for a, b in _OFFSETS[1:]:
        candidate = za - ((m + a) * w1 + (n + b) * w2)
        better = np.abs(candidate) < best_abs
        best = np.where(better, candidate, best)
        best_abs = np.where(better, np.abs(candidate), best_abs)
        best_m = np.where(better, m + a, best_m)
        best_n = np.where(better, n + b, best_n)

    lam = best_m * w1 + best_n * w2
    z0 = za - lam
    if za.ndim == 0:
        return complex(z0), complex(lam)
    return z0, lam


def wp(z: ArrayLike, f: EllipticFunction) -> ArrayLike:
    """
    Weierstrass p at ``z``; INFINITY within eps_pole of a lattice point.

    Even and doubly periodic. Scalars in, scalar out.
    """
    values, _, _ = f.evaluate(z)
    return complex(values[()]) if np.ndim(z) == 0 else values


def wp_prime(z: ArrayLike, f: EllipticFunction) -> ArrayLike:
    """Derivative of p; odd, with triple poles at the lattice points."""
    _, derivs, _ = f.evaluate(z)
    return complex(derivs[()]) if np.ndim(z) == 0 else derivs


@dataclass(frozen=True)
class CriticalValues:
    """Finite critical values e1 = p(w1/2), e2 = p((w1+w2)/2), e3 = p(w2/2) and diagnostics."""

    values: Tuple[complex, complex, complex]
    residuals: Tuple[float, float, float]

    @property
    def with_infinity(self) -> Tuple[complex, complex, complex, complex]:
        return (*self.values, INFINITY)


def critical_values(f: EllipticFunction) -> CriticalValues:
    """
    The three finite critical values of p (the fourth is infinity).

    Each comes with the residual |4e^3 - g2 e - g3| against the invariants.
    """
    lat = f.lattice
    values = tuple(complex(v) for v in wp(np.array(lat.half_periods), f))
    residuals = tuple(float(abs(4 * e**3 - lat.g2 * e - lat.g3)) for e in values)
    return CriticalValues(values=values, residuals=residuals)


def lattice_points_in_disk(lat: Lattice, center: complex, r: float) -> np.ndarray:
    """
    All lattice points with |lambda - center| <= r.

    The index box comes from the inverse generator matrix: a linear functional
    bounded by r * (row norm) over the disk.

    Returns:
        Complex array sorted by modulus, ties by argument
    """
    if r < 0:
        raise ValueError(f"Radius must be nonnegative, got {r}")
    w1, w2 = lat.omega1, lat.omega2
    basis = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
    inverse = np.linalg.inv(basis)
    c = complex(center)
    s0 = inverse[0, 0] * c.real + inverse[0, 1] * c.imag
    t0 = inverse[1, 0] * c.real + inverse[1, 1] * c.imag
    span_s = r * float(np.hypot(*inverse[0]))
    span_t = r * float(np.hypot(*inverse[1]))

    ms = np.arange(math.floor(s0 - span_s), math.ceil(s0 + span_s) + 1)
    ns = np.arange(math.floor(t0 - span_t), math.ceil(t0 + span_t) + 1)
    points = (ms[np.newaxis, :] * w1 + ns[:, np.newaxis] * w2).ravel()
    points = points[np.abs(points - c) <= r]
    order = np.lexsort((np.angle(points), np.abs(points)))
    return points[order]


def solve_wp(f: EllipticFunction, a: complex, seeds: int = 8) -> np.ndarray:
    """
    The two solutions of p(u) = a in one period cell.

    Newton iteration from a ``seeds`` x ``seeds`` grid over the cell; converged
    roots are deduplicated modulo the lattice.

    Raises:
        ValueError: If ``a`` is a critical value or the roots are not resolved
    """
    crit = critical_values(f).values
    if min(abs(a - e) for e in crit) <= 1e-9 * (1.0 + abs(a)):
        raise ValueError(f"{a} is a critical value of p")

    w1, w2 = f.lattice.omega1, f.lattice.omega2
    grid = (np.arange(seeds) + 0.5) / seeds
    u = (grid[np.newaxis, :] * w1 + grid[:, np.newaxis] * w2).ravel()
    for _ in range(60):
        value, deriv, _ = f.evaluate(u)
        ok = np.isfinite(value) & np.isfinite(deriv) & (deriv != 0)
        step = np.where(ok, (value - a) / np.where(ok, deriv, 1.0), 0.0)
        # Newton overshoots near poles; damp large steps to a quarter cell.
        big = np.abs(step) > 0.25 * f.lattice.diameter
        step = np.where(big, step / np.abs(np.where(big, step, 1.0)) * 0.25 * f.lattice.diameter, step)
        u = np.where(ok, u - step, u)
        if np.all(np.abs(step) < 1e-15 * f.lattice.diameter):
            break

    value, _, _ = f.evaluate(u)
    converged = np.isfinite(value) & (np.abs(value - a) <= 1e-9 * max(1.0, abs(a)))
    roots: list = []
    for root in u[converged]:
        r0, _ = reduce_to_fundamental(complex(root), f.lattice)
        if all(abs(reduce_to_fundamental(r0 - other, f.lattice)[0]) > 1e-7 * f.lattice.diameter for other in roots):
            roots.append(r0)
    if len(roots) != 2:
        raise ValueError(f"Level set p = {a} not resolved: found {len(roots)} roots")
    return np.array(sorted(roots, key=lambda w: (abs(w), np.angle(w))))
