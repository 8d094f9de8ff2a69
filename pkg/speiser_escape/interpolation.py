"""
Interpolation Stacks
====================
Boundary diffeomorphisms of the real line and the explicit quasiconformal
interpolation map between two of them across a horizontal strip.

In strip coordinates the lower boundary is Im z = 0 and the upper boundary is
Im z = a' - b. The map

    L(x + iy) = (1 - y/D) chi1(x) + (y/D) chi2(x) + i (a - b)/D * y,   D = a' - b,

agrees with chi1 below and with chi2 + i(a - b) above. Above the strip the stack
continues as the horizontal shear chi2(x) + i(y - D + a - b).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline

logger = logging.getLogger(__name__)

ArrayLike = Union[float, complex, np.ndarray]


def _bisect(
    func: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    iterations: int = 80,
) -> np.ndarray:
    """Vectorized bisection for an increasing ``func`` with func(lo) <= target <= func(hi)."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = func(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


class BoundaryMap(ABC):
    """Strictly increasing C^1 map of the real line with chi(x + 1) = chi(x) + 1."""

    @abstractmethod
    def __call__(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def derivative(self, x: np.ndarray) -> np.ndarray:
        ...

    @property
    @abstractmethod
    def displacement_bound(self) -> float:
        """Upper bound for |chi(x) - x|."""

    def inverse(self, y: ArrayLike) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        m = self.displacement_bound + 1.0
        return _bisect(self, y, y - m, y + m)

    def validate(self, samples: int = 4096) -> None:
        """Raise ValueError unless the derivative is positive on a dense period sample."""
        x = np.linspace(0.0, 1.0, samples, endpoint=False)
        slope = self.derivative(x)
        if np.min(slope) <= 0.0:
            raise ValueError(
                f"Boundary map is not strictly increasing (min slope {np.min(slope):.3g})"
            )
        shift = self(x + 1.0) - self(x)
        if np.max(np.abs(shift - 1.0)) > 1e-9:
            raise ValueError("Boundary map does not commute with unit translation")


class IdentityBoundary(BoundaryMap):
    def __call__(self, x):
        return np.asarray(x, dtype=float)

    def derivative(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    @property
    def displacement_bound(self) -> float:
        return 0.0

    def inverse(self, y):
        return np.asarray(y, dtype=float)


@dataclass(frozen=True, eq=False)
class SineBoundary(BoundaryMap):
    """chi(x) = x + A sin(2 pi (x + phase)); strictly increasing iff 2 pi |A| < 1."""

    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if 2.0 * np.pi * abs(self.amplitude) >= 1.0:
            raise ValueError(
                f"Sine displacement amplitude {self.amplitude} breaks monotonicity"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x + self.amplitude * np.sin(2.0 * np.pi * (x + self.phase))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 + 2.0 * np.pi * self.amplitude * np.cos(2.0 * np.pi * (x + self.phase))

    @property
    def displacement_bound(self) -> float:
        return abs(self.amplitude)


class SampledBoundary(BoundaryMap):
    """
    Boundary map from displacement samples d_k = chi(k/n) - k/n over one period.

    The displacement is interpolated by a periodic cubic spline.
    """

    def __init__(self, displacements: Sequence[float]):
        d = np.asarray(displacements, dtype=float)
        if d.ndim != 1 or d.size < 4:
            raise ValueError("Need at least 4 displacement samples")
        nodes = np.linspace(0.0, 1.0, d.size + 1)
        self._spline = CubicSpline(nodes, np.append(d, d[0]), bc_type="periodic")
        self._slope = self._spline.derivative()
        dense = self._spline(np.linspace(0.0, 1.0, 4097))
        self._bound = float(np.max(np.abs(dense)))
        self.validate()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x + self._spline(np.mod(x, 1.0))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 + self._slope(np.mod(x, 1.0))

    @property
    def displacement_bound(self) -> float:
        return self._bound


@dataclass(frozen=True, eq=False)
class InterpolationStack:
    """
    Strip data for the interpolation map.

    Args:
        a: Target height parameter
        a_prime: Source height parameter
        b: Common base (b < min(a, a'))
        chi1: Boundary map on the lower boundary line
        chi2: Boundary map on the upper boundary line
    """

    a: float
    a_prime: float
    b: float
    chi1: BoundaryMap
    chi2: BoundaryMap

    def __post_init__(self):
        if not self.b < min(self.a, self.a_prime):
            raise ValueError(f"Strip base b={self.b} must lie below a={self.a} and a'={self.a_prime}")
        self.chi1.validate()
        self.chi2.validate()

    @classmethod
    def identity(cls, a: float = 1.0, a_prime: float = 1.0, b: float = 0.0) -> "InterpolationStack":
        return cls(a, a_prime, b, IdentityBoundary(), IdentityBoundary())

    @property
    def depth(self) -> float:
        """Source strip height D = a' - b."""
        return self.a_prime - self.b

    @property
    def height(self) -> float:
        """Image strip height a - b."""
        return self.a - self.b

    def _in_strip(self, z: np.ndarray) -> np.ndarray:
        tol = 1e-12 * max(1.0, self.depth)
        return (z.imag >= -tol) & (z.imag <= self.depth + tol)

    def _strip_map(self, z: np.ndarray) -> np.ndarray:
        x, y = z.real, z.imag
        s = y / self.depth
        return (1.0 - s) * self.chi1(x) + s * self.chi2(x) + 1j * (self.height / self.depth) * y

    def partials(self, z: ArrayLike):
        """Partial derivatives (L_x, L_y) of the strip map."""
        z = np.asarray(z, dtype=complex)
        x, y = z.real, z.imag
        s = y / self.depth
        lx = (1.0 - s) * self.chi1.derivative(x) + s * self.chi2.derivative(x)
        ly = (self.chi2(x) - self.chi1(x)) / self.depth + 1j * self.height / self.depth
        return lx + 0j, ly

    def jacobian(self, z: ArrayLike) -> np.ndarray:
        """Closed-form Jacobian ((a-b)/D) [(1-y/D) chi1'(x) + (y/D) chi2'(x)]."""
        z = np.asarray(z, dtype=complex)
        s = z.imag / self.depth
        mix = (1.0 - s) * self.chi1.derivative(z.real) + s * self.chi2.derivative(z.real)
        return (self.height / self.depth) * mix

    def stack_map(self, z: ArrayLike) -> np.ndarray:
        """
        Stack map on the closed upper half-plane: L inside the strip, the shear
        chi2(x) + i(y - D + a - b) above it.
        """
        z = np.asarray(z, dtype=complex)
        above = z.imag > self.depth
        shear = self.chi2(z.real) + 1j * (z.imag - self.depth + self.height)
        return np.where(above, shear, self._strip_map(np.where(above, 0j, z)))

    def stack_jacobian(self, z: ArrayLike) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        above = z.imag > self.depth
        return np.where(above, self.chi2.derivative(z.real), self.jacobian(np.where(above, 0j, z)))

    def stack_inverse(self, w: ArrayLike) -> np.ndarray:
        """Inverse of ``stack_map`` on the closed upper half-plane."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        out = np.empty_like(w)
        above = w.imag >= self.height
        if np.any(above):
            wa = w[above]
            out[above] = self.chi2.inverse(wa.real) + 1j * (wa.imag - self.height + self.depth)
        inside = ~above
        if np.any(inside):
            wi = w[inside]
            y = wi.imag * self.depth / self.height
            s = y / self.depth
            m = max(self.chi1.displacement_bound, self.chi2.displacement_bound) + 1.0

            def mixed(x: np.ndarray) -> np.ndarray:
                return (1.0 - s) * self.chi1(x) + s * self.chi2(x)

            x = _bisect(mixed, wi.real, wi.real - m, wi.real + m)
            out[inside] = x + 1j * y
        return out


def interpolation_map(s: InterpolationStack, z: ArrayLike) -> ArrayLike:
    """
    Evaluate the strip interpolation map L.

    Raises:
        ValueError: If any point lies outside 0 <= Im z <= a' - b
    """
    za = np.asarray(z, dtype=complex)
    if not np.all(s._in_strip(za)):
        raise ValueError("outside interpolation strip")
    out = s._strip_map(za)
    return complex(out) if out.ndim == 0 else out


def dilatation(s: InterpolationStack, z: ArrayLike) -> ArrayLike:
    """
    Dilatation K = (|L_z| + |L_zbar|) / (|L_z| - |L_zbar|) of the strip map.

    Raises:
        ValueError: Outside the strip, or where the Jacobian is not positive
    """
    za = np.asarray(z, dtype=complex)
    if not np.all(s._in_strip(za)):
        raise ValueError("outside interpolation strip")
    lx, ly = s.partials(za)
    lz = 0.5 * (lx - 1j * ly)
    lzbar = 0.5 * (lx + 1j * ly)
    a, b = np.abs(lz), np.abs(lzbar)
    if np.any(a - b <= 0.0):
        raise ValueError("orientation violation")
    k = (a + b) / (a - b)
    return float(k) if k.ndim == 0 else k
