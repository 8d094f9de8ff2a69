import math

import numpy as np
import pytest

from speiser_escape.covering import (
    DEFAULT_C1,
    BranchChain,
    branch_derivative_bound,
    chain_diameter,
    chain_normalization,
    component_bounds,
    koebe_derivative_bounds,
    koebe_quarter,
    koebe_value_bounds,
    local_inverse_branch,
    local_inverse_derivative,
)
from speiser_escape.elliptic import EllipticFunction, lattice_with_opening
from speiser_escape.models import PoleDatum, WpPower


def test_koebe_bounds_at_one_half():
    low, high = koebe_value_bounds(1.0, 1.0, 0.5)
    assert low == pytest.approx(2 / 9, abs=1e-15)
    assert high == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("lam", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_koebe_bounds_are_attained_by_extremal_function(lam):
    low, high = koebe_value_bounds(1.0, 1.0, lam)
    dlow, dhigh = koebe_derivative_bounds(1.0, lam)
    assert high == pytest.approx(lam / (1 - lam) ** 2)
    assert low == pytest.approx(lam / (1 + lam) ** 2)
    assert dhigh == pytest.approx((1 + lam) / (1 - lam) ** 3)
    assert dlow == pytest.approx((1 - lam) / (1 + lam) ** 3)


def test_koebe_rejects_lambda_outside_unit_interval():
    with pytest.raises(ValueError):
        koebe_value_bounds(1.0, 1.0, 1.0)


def test_koebe_quarter_disk():
    disk = koebe_quarter(2j, 4.0, 1.0)
    assert disk.radius == 1.0
    assert disk.contains(2.5j)
    assert not disk.contains(3.5j)


def test_component_radii():
    comp = component_bounds(PoleDatum(0j, 2, 1.0, 0j), 100.0)
    assert comp.inner_radius == pytest.approx(0.025, abs=1e-15)
    assert comp.outer_radius == pytest.approx(0.2, abs=1e-15)
    assert comp.inner.radius < comp.outer.radius


def test_components_enclose_the_escaping_neighbourhood():
    m = WpPower(EllipticFunction(lattice_with_opening(math.pi)), 1.0)
    radius = 1e3
    poles = [p for p in m.poles_in_disk(500.0) if p.location.real > 0 and abs(p.location) >= 10]
    angles = np.exp(1j * np.linspace(0, 2 * math.pi, 128, endpoint=False))
    for p in poles[:: max(1, len(poles) // 5)][:5]:
        comp = component_bounds(p, radius, m)
        assert np.all(np.abs(m(p.location + 0.99 * comp.inner_radius * angles)) > radius)
        assert np.all(np.abs(m(p.location + 1.01 * comp.outer_radius * angles)) < radius)


def test_inverse_branch_derivative_bound(rng):
    b = rng.uniform(0.1, 10.0, 2000)
    w = 10.0 ** rng.uniform(0, 6, 2000) * np.exp(1j * rng.uniform(-math.pi, math.pi, 2000))
    measured = np.abs(local_inverse_derivative(b, w))
    bound = np.array([branch_derivative_bound(bk, abs(wk)) for bk, wk in zip(b, w)])
    assert np.all(measured <= bound * (1 + 1e-12))


def test_inverse_branch_inverts_local_model():
    p = PoleDatum(3 + 1j, 2, 2.0, 0j)
    w = np.array([150.0, -200j, 1e4 + 1e4j])
    z = local_inverse_branch(p, w)
    assert np.allclose((p.coefficient / (z - p.location)) ** 2, w)


def test_chain_bound_is_submultiplicative():
    radius = 100.0
    first = BranchChain((150 + 50j, 300 + 100j), (3.0, 4.0))
    second = BranchChain((400 - 20j,), (5.0,))
    joined = chain_diameter(first + second, radius)[1]
    product = chain_diameter(first, radius)[1] * chain_diameter(second, radius)[1]
    assert joined <= product * chain_normalization(first, radius) * (1 + 1e-12)


def test_chain_bound_dominates_measured_diameter():
    radius = 100.0
    chain = BranchChain((150 + 50j, 300 + 100j), (3.0, 4.0), DEFAULT_C1)
    circle = radius * np.exp(1j * np.linspace(0, 2 * math.pi, 1024, endpoint=False))
    inner = local_inverse_branch(PoleDatum(300 + 100j, 2, 4.0, 0j), circle)
    image = local_inverse_branch(PoleDatum(150 + 50j, 2, 3.0, 0j), inner)
    diameter = float(np.max(np.abs(image[:, None] - image[None, :])))
    assert chain_diameter(chain, radius)[0] >= diameter


def test_chain_leaving_escape_disk_rejected():
    with pytest.raises(ValueError, match="leaves B"):
        chain_diameter(BranchChain((5 + 0j,), (1.0,)), 100.0)


def test_chain_validation():
    with pytest.raises(ValueError):
        BranchChain((), ())
    with pytest.raises(ValueError):
        BranchChain((200j,), (1.0,), c1=0.0)
    with pytest.raises(ValueError, match="different C1"):
        BranchChain((200j,), (1.0,), 0.5) + BranchChain((300j,), (1.0,), 0.25)
