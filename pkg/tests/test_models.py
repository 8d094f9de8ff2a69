import math

import numpy as np
import pytest

from speiser_escape.covering import component_bounds
from speiser_escape.elliptic import EllipticFunction, Lattice, lattice_with_opening
from speiser_escape.interpolation import InterpolationStack, SineBoundary
from speiser_escape.models import (
    Branch,
    GluedOrderTwo,
    PlainWp,
    PowerLift,
    WpCosh,
    WpExp,
    WpPower,
    default_shift,
    gluing_residual,
    leading_coefficient,
    local_expansion_error,
    minimum_escape_radius,
    singular_values,
    validate_shift,
)
from speiser_escape.sphere_geometry import PlanarRegion, chordal_distance, is_infinite


def test_plain_poles_are_lattice_points(square_wp):
    inventory = PlainWp(square_wp).pole_inventory(2.0)
    assert len(inventory) == 13
    assert np.all(inventory.multiplicities == 2)
    assert np.allclose(inventory.coefficients, 1.0)
    assert np.all(np.diff(inventory.moduli) >= -1e-12)


def test_inventory_within_restricts(square_wp):
    inventory = PlainWp(square_wp).pole_inventory(3.0)
    assert len(inventory.within(1.0)) == 5
    with pytest.raises(ValueError):
        inventory.within(4.0)


def test_model_evaluates_to_infinity_at_poles(square_wp):
    m = WpPower(square_wp, 1.0)
    poles = m.pole_inventory(20.0).locations
    assert np.all(is_infinite(m(poles)))


def test_order_two_power_model_is_shifted_plain(square_wp, rng):
    z = rng.uniform(-3, 3, 300) + 1j * rng.uniform(-3, 3, 300)
    power = WpPower(square_wp, 2.0)
    gap = chordal_distance(power(z), PlainWp(square_wp)(z + power.c))
    assert np.max(gap) < 1e-12


def test_power_model_brute_force_count(square_wp):
    m = WpPower(square_wp, 1.0)
    c = m.c
    brute = 0
    for j in range(-12, 13):
        for k in range(-12, 13):
            mu = j + 1j * k - c
            if abs(mu) ** 2 <= 100 and -math.pi / 2 < np.angle(mu) <= math.pi / 2:
                brute += 1
    assert len(m.pole_inventory(100.0)) == brute


def test_power_model_rejects_order_above_two(square_wp):
    with pytest.raises(ValueError, match="order"):
        WpPower(square_wp, 2.5)


def test_shift_on_half_period_rejected(square_wp):
    with pytest.raises(ValueError, match="half period"):
        WpExp(square_wp, 0.5)
    assert validate_shift(default_shift(square_wp.lattice), square_wp.lattice) == (1 + 1j) / 4


def test_power_seam_branches_differ(square_wp):
    m = WpPower(square_wp, 1.0)
    assert m.seam_residual(-np.linspace(0.5, 4.0, 16)) > 1e-6
    result = m.evaluate(np.array([-2.0 + 0j, 2.0 + 0j]))
    assert result.seam.tolist() == [True, False]
    with pytest.raises(ValueError):
        m.seam_residual([1.0])


def test_exp_model_coefficients_decay(square_wp):
    inventory = WpExp(square_wp).pole_inventory(5.0)
    assert len(inventory) > 0
    assert np.allclose(inventory.coefficients * np.exp(inventory.locations.real), 1.0, rtol=1e-10)


def test_exp_model_is_periodic(square_wp, rng):
    m = WpExp(square_wp)
    z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-3, 3, 50)
    assert np.max(chordal_distance(m(z), m(z + 2j * math.pi))) < 1e-9


def test_cosh_model_poles():
    m = WpCosh.standard()
    inventory = m.pole_inventory(math.cosh(5.0) * (1 + 1e-9))
    assert len(inventory) == 6
    assert np.allclose(np.sort(inventory.locations.real), np.cosh(np.arange(6.0)), rtol=1e-12)
    assert int(np.sum(inventory.multiplicities)) == 11


def test_cosh_model_needs_vertical_period(square_wp):
    with pytest.raises(ValueError, match="2\\*pi\\*i"):
        WpCosh(square_wp)


def test_local_expansion_matches_leading_coefficient(square_wp):
    m = WpPower(square_wp, 1.0)
    poles = [p for p in m.poles_in_disk(50.0) if p.location.real > 0]
    for p in poles[::10]:
        assert local_expansion_error(m, p) < 1e-3
        assert leading_coefficient(m, p) == pytest.approx(p.coefficient, rel=1e-9)


def test_power_lift_multiplies_poles(square_wp):
    base = WpPower(square_wp, 1.0)
    for n in (2, 3):
        lifted = PowerLift(base, n)
        assert len(lifted.pole_inventory(3.0)) == n * len(base.pole_inventory(3.0**n))


def test_power_lift_for_order():
    m = PowerLift.for_order(2.5, EllipticFunction(lattice_with_opening(1.25 * math.pi)))
    assert m.n == 2
    assert m.base.rho == pytest.approx(1.25)


def test_power_lift_for_order_rejects_order_below_one(square_wp):
    with pytest.raises(ValueError, match="at least 1"):
        PowerLift.for_order(0.5, square_wp)


def test_singular_values_include_asymptotic_value(square_wp):
    m = WpExp(square_wp)
    values = singular_values(m)
    assert len(values) == 4
    assert minimum_escape_radius(m) == pytest.approx(4 * max(abs(v) for v in values))


def test_identical_gluing_has_zero_residual(generic_wp):
    identity = InterpolationStack.identity()
    m = GluedOrderTwo(generic_wp, generic_wp, identity, identity, 0.2 + 0.3j, 0.2 + 0.3j)
    assert gluing_residual(m, np.linspace(-2, 2, 201)) < 1e-10


def test_conjugate_gluing_reflects_upper_values(generic_lattice):
    identity = InterpolationStack.identity()
    m = GluedOrderTwo(
        EllipticFunction(generic_lattice),
        EllipticFunction(generic_lattice.conjugate()),
        identity,
        identity,
        0.2 + 0.3j,
    )
    x = np.linspace(-2, 2, 201) + 0j
    assert m.c2 == pytest.approx(0.2 - 0.3j)
    assert np.max(chordal_distance(m.lower_value(x), np.conj(m.upper_value(x)))) < 1e-8


def test_glued_model_poles(generic_wp):
    stack = InterpolationStack(1.0, 1.0, 0.0, SineBoundary(0.05), SineBoundary(0.05))
    m = GluedOrderTwo(generic_wp, generic_wp, stack, stack)
    inventory = m.pole_inventory(6.0)
    assert len(inventory) > 0
    assert np.all(inventory.multiplicities == 2)
    far = inventory.locations[~inventory.approximate]
    assert np.all(is_infinite(m(far)))


def test_glued_model_needs_unit_period():
    f = EllipticFunction(Lattice(2.0, 1j))
    identity = InterpolationStack.identity()
    with pytest.raises(ValueError, match="horizontal period"):
        GluedOrderTwo(f, f, identity, identity)


def test_branch_enum_values():
    assert Branch("minus") is Branch.MINUS


def test_exp_model_inventory_accounts_for_every_large_value(square_wp):
    m = WpExp(square_wp)
    region = PlanarRegion(-1.0, 1.5, -math.pi, math.pi, resolution=(250, 628))
    z = region.grid().ravel()
    hot = z[np.abs(m(z)) > 100.0]
    inventory = m.pole_inventory(4.0)
    poles = inventory.locations

    distance = np.abs(hot[:, None] - poles[None, :])
    nearest = np.argmin(distance, axis=1)
    outer = np.array([component_bounds(p, 100.0).outer_radius for p in inventory.data()])
    assert np.all(distance[np.arange(hot.size), nearest] < outer[nearest])

    inner = poles[
        (poles.real >= -0.9) & (poles.real <= 1.4) & (np.abs(poles.imag) <= math.pi - 0.02)
    ]
    assert inner.size > 40
    found = set(nearest.tolist())
    missing = [p for p in inner if int(np.flatnonzero(poles == p)[0]) not in found]
    assert missing == []
