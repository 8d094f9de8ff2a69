import math

import numpy as np
import pytest
from scipy.special import gamma

from speiser_escape.elliptic import (
    EllipticFunction,
    Lattice,
    critical_values,
    lattice_points_in_disk,
    lattice_with_opening,
    reduce_to_fundamental,
    solve_wp,
    wp,
    wp_prime,
)
from speiser_escape.sphere_geometry import is_infinite


def _cell_points(lat: Lattice, rng, n: int = 400) -> np.ndarray:
    s, t = rng.uniform(0, 1, (2, n))
    z = s * lat.omega1 + t * lat.omega2
    z0, _ = reduce_to_fundamental(z, lat)
    return z[np.abs(z0) > 0.05 * lat.diameter]


def test_lattice_orientation_is_normalized():
    lat = Lattice(1.0, -1j)
    assert lat.omega2 == 1j
    assert lat.tau.imag > 0


def test_collinear_generators_rejected():
    with pytest.raises(ValueError, match="collinear"):
        Lattice(1.0, 2.0)


def test_square_lattice_invariants():
    lat = Lattice(1.0, 1j)
    assert lat.g2 == pytest.approx(gamma(0.25) ** 8 / (16.0 * math.pi**2), rel=1e-9)
    assert abs(lat.g3) < 1e-8


def test_differential_equation(generic_wp, rng):
    lat = generic_wp.lattice
    z = _cell_points(lat, rng)
    p, dp, resolved = generic_wp.evaluate(z)
    assert resolved.all()
    rhs = 4 * p**3 - lat.g2 * p - lat.g3
    scale = np.abs(dp**2) + np.abs(4 * p**3) + np.abs(lat.g2 * p) + np.abs(lat.g3)
    assert np.max(np.abs(dp**2 - rhs) / scale) < 1e-9


def test_double_periodicity(generic_wp, rng):
    lat = generic_wp.lattice
    z = _cell_points(lat, rng, 200)
    p, _, _ = generic_wp.evaluate(z)
    for m, n in ((1, 0), (0, 1), (-3, 2), (3, -3)):
        shifted, _, _ = generic_wp.evaluate(z + m * lat.omega1 + n * lat.omega2)
        assert np.max(np.abs(shifted - p) / (1 + np.abs(p))) < 1e-10


def test_parity(generic_wp, rng):
    z = _cell_points(generic_wp.lattice, rng, 200)
    p, dp, _ = generic_wp.evaluate(z)
    p_neg, dp_neg, _ = generic_wp.evaluate(-z)
    assert np.allclose(p_neg, p, rtol=1e-10, atol=1e-10)
    assert np.allclose(dp_neg, -dp, rtol=1e-10, atol=1e-10)


def test_laurent_expansion_near_origin(square_wp):
    z = 0.01 * np.exp(1j * np.linspace(0, 2 * math.pi, 16, endpoint=False))
    p = wp(z, square_wp)
    g2 = square_wp.lattice.g2
    assert np.max(np.abs(p - 1 / z**2 - g2 * z**2 / 20)) < 1e-6


def test_lattice_points_are_poles(square_wp):
    assert is_infinite(wp(0j, square_wp))
    assert is_infinite(wp(2 + 3j, square_wp))
    assert is_infinite(wp_prime(1j, square_wp))


def test_critical_values_sum_to_zero(generic_wp):
    crit = critical_values(generic_wp)
    assert abs(sum(crit.values)) < 1e-10 * max(abs(e) for e in crit.values)
    assert max(crit.residuals) < 1e-8 * max(1.0, abs(generic_wp.lattice.g2)) ** 1.5
    assert is_infinite(crit.with_infinity[3])


def test_square_lattice_critical_values(square_wp):
    e1, e2, e3 = critical_values(square_wp).values
    assert abs(e2) < 1e-10
    assert abs(e1 + e3) < 1e-10
    assert e1.real > 0


def test_reduce_to_fundamental_splits_lattice_part(generic_lattice):
    z = 3.7 - 2.2j
    z0, lam = reduce_to_fundamental(z, generic_lattice)
    assert z0 + lam == pytest.approx(z)
    assert generic_lattice.contains(lam)
    assert abs(z0) <= generic_lattice.diameter


def test_lattice_points_in_disk_matches_gauss_circle():
    points = lattice_points_in_disk(Lattice(1.0, 1j), 0j, 10.0)
    assert points.size == 317
    assert np.all(np.diff(np.abs(points)) >= -1e-12)


def test_lattice_with_opening_has_unit_ratio():
    lat = lattice_with_opening(math.pi / 2, 0.5)
    assert abs(lat.tau) == pytest.approx(1.0)
    assert np.angle(lat.tau) == pytest.approx(math.pi / 4)
    with pytest.raises(ValueError):
        lattice_with_opening(2 * math.pi)


def test_solve_wp_returns_both_preimages(generic_wp):
    a = 2.0 - 1.5j
    roots = solve_wp(generic_wp, a)
    assert roots.size == 2
    values = wp(roots, generic_wp)
    assert np.allclose(values, a, rtol=1e-9)


def test_solve_wp_rejects_critical_values(square_wp):
    e1 = critical_values(square_wp).values[0]
    with pytest.raises(ValueError, match="critical value"):
        solve_wp(square_wp, e1)


def test_small_truncation_rejected(square_lattice):
    with pytest.raises(ValueError, match="Truncation"):
        EllipticFunction(square_lattice, truncation=4)


def _eisenstein_q_series(tau: complex) -> tuple:
    """G4 and G6 of (1, tau) from the divisor-sum q-expansions."""
    q = np.exp(2j * math.pi * tau)
    s4 = s6 = 0j
    for n in range(1, 80):
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        s4 += sum(d**3 for d in divisors) * q**n
        s6 += sum(d**5 for d in divisors) * q**n
    return math.pi**4 / 45 * (1 + 240 * s4), 2 * math.pi**6 / 945 * (1 - 504 * s6)


def _direct_wp(z: complex, tau: complex, shells: int) -> complex:
    """Symmetric square sum over |m|, |n| <= shells with no tail correction."""
    m, n = np.meshgrid(np.arange(-shells, shells + 1), np.arange(-shells, shells + 1))
    w = (m + n * tau).ravel()
    w = w[w != 0]
    return complex(1 / z**2 + np.sum(1 / (z - w) ** 2 - 1 / w**2))


@pytest.mark.parametrize("tau", [1j, 0.3 + 1.1j, 0.5 + 0.9j, 2.5j])
def test_invariants_match_q_expansion(tau):
    lat = Lattice(1.0, tau)
    g4, g6 = _eisenstein_q_series(lat.reduced[1] / lat.reduced[0])
    r1 = lat.reduced[0]
    assert lat.g2 == pytest.approx(60 * g4 / r1**4, rel=1e-10)
    assert abs(lat.g3 - 140 * g6 / r1**6) < 1e-10 * max(1.0, abs(lat.g3))


def test_doubling_truncation_leaves_values_unchanged(generic_lattice, rng):
    coarse = EllipticFunction(generic_lattice, truncation=10)
    fine = EllipticFunction(generic_lattice, truncation=20)
    z = _cell_points(generic_lattice, rng, 300)
    p, dp, _ = coarse.evaluate(z)
    p2, dp2, _ = fine.evaluate(z)
    assert np.max(np.abs(p2 - p) / np.maximum(1.0, np.abs(p))) < 1e-12
    assert np.max(np.abs(dp2 - dp) / np.maximum(1.0, np.abs(dp))) < 1e-11
    g2, g3 = generic_lattice.invariants(10)
    g2_fine, g3_fine = generic_lattice.invariants(20)
    assert abs(g2_fine - g2) < 1e-10 * abs(g2)
    assert abs(g3_fine - g3) < 1e-10 * max(1.0, abs(g3))


def test_square_lattice_middle_value_by_direct_summation(square_wp):
    z = (1 + 1j) / 2
    assert abs(wp(z, square_wp)) < 1e-12
    for point in (z, 0.31 + 0.17j):
        coarse, fine = _direct_wp(point, 1j, 200), _direct_wp(point, 1j, 400)
        extrapolated = (4 * fine - coarse) / 3
        assert abs(wp(point, square_wp) - extrapolated) < 1e-6


def test_elongated_lattice_keeps_the_differential_equation(rng):
    f = EllipticFunction(Lattice(1.0, 2 * math.pi * 1j))
    lat = f.lattice
    z = _cell_points(lat, rng, 300)
    p, dp, _ = f.evaluate(z)
    rhs = 4 * p**3 - lat.g2 * p - lat.g3
    scale = np.abs(dp**2) + np.abs(4 * p**3) + np.abs(lat.g2 * p) + np.abs(lat.g3)
    assert np.max(np.abs(dp**2 - rhs) / scale) < 1e-9
