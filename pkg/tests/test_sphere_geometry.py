import math

import numpy as np
import pytest
from scipy.integrate import quad

from speiser_escape.sphere_geometry import (
    INFINITY,
    PlanarRegion,
    chordal_distance,
    euclidean_density,
    is_infinite,
    logarea,
    normalize_extended,
    spherical_area,
    spherical_density,
    twb_finiteness,
)


def test_chordal_distance_to_infinity():
    assert chordal_distance(0j, INFINITY) == 2.0
    assert chordal_distance(1 + 0j, INFINITY) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert chordal_distance(INFINITY, INFINITY) == 0.0


def test_chordal_distance_is_symmetric_and_bounded(rng):
    z = rng.normal(size=500) + 1j * rng.normal(size=500)
    w = rng.normal(scale=10, size=500) + 1j * rng.normal(scale=10, size=500)
    d = chordal_distance(z, w)
    assert np.allclose(d, chordal_distance(w, z))
    assert np.all((d >= 0) & (d <= 2.0))


def test_chordal_triangle_inequality(rng):
    pts = rng.normal(scale=3.0, size=(3, 2000)) + 1j * rng.normal(scale=3.0, size=(3, 2000))
    pts[:, ::37] = INFINITY
    a, b, c = pts
    slack = chordal_distance(a, b) + chordal_distance(b, c) - chordal_distance(a, c)
    assert np.all(slack >= -1e-12)


def test_normalize_extended_maps_huge_values_to_infinity():
    out = normalize_extended(np.array([1.0, 1e20, np.nan, np.inf]))
    assert out[0] == 1.0
    assert np.all(is_infinite(out[1:]))
    assert is_infinite(INFINITY) is True


def test_region_grid_is_cell_centered_top_down():
    region = PlanarRegion(0.0, 1.0, 0.0, 1.0, resolution=4)
    grid = region.grid()
    assert grid.shape == (4, 4)
    assert grid[0, 0] == pytest.approx(0.125 + 0.875j)
    assert grid[-1, -1] == pytest.approx(0.875 + 0.125j)


def test_degenerate_region_rejected():
    with pytest.raises(ValueError):
        PlanarRegion(1.0, 1.0, 0.0, 1.0, resolution=8)


def test_unit_disk_spherical_area():
    area = spherical_area(PlanarRegion.disk(0j, 1.0, resolution=256))
    assert area == pytest.approx(2.0 * math.pi, rel=0.01)


def test_spherical_density_of_half_disk():
    disk = PlanarRegion.disk(0j, 1.0, resolution=128)
    upper = PlanarRegion(-1.0, 1.0, 0.0, 1.0, resolution=16)
    assert spherical_density(upper, disk) == pytest.approx(0.5, abs=0.02)
    assert euclidean_density(upper, disk) == pytest.approx(0.5, abs=0.02)


def test_logarea_of_annulus():
    ring = logarea(PlanarRegion.annulus(1.0, math.e, resolution=512))
    assert ring.finite
    assert ring.value == pytest.approx(2.0 * math.pi, rel=0.03)


def test_logarea_rejects_origin_without_excision():
    with pytest.raises(ValueError, match="singular integrand"):
        logarea(PlanarRegion(-1.0, 1.0, -1.0, 1.0, resolution=8))


def test_logarea_with_excised_unit_disk():
    estimate = logarea(PlanarRegion.disk(0j, math.e, resolution=512), excise_unit_disk=True)
    assert estimate.value == pytest.approx(2.0 * math.pi, rel=0.03)


def test_twb_conformal_is_zero():
    estimate = twb_finiteness(lambda z: np.ones(z.shape), resolution=256)
    assert estimate.finite
    assert estimate.estimate == 0.0


def test_twb_constant_dilatation_diverges():
    assert not twb_finiteness(lambda z: np.full(z.shape, 2.0), resolution=256).finite


def test_twb_decaying_dilatation_is_finite():
    estimate = twb_finiteness(lambda z: 1.0 + 1.0 / np.abs(z) ** 2, resolution=512)
    assert estimate.finite
    assert math.isfinite(estimate.estimate)


def test_twb_rejects_dilatation_below_one():
    with pytest.raises(ValueError, match="invalid dilatation"):
        twb_finiteness(lambda z: np.full(z.shape, 0.5), resolution=64)


def _strip(z: np.ndarray) -> np.ndarray:
    return (z.imag > 0.0) & (z.imag < 1.0)


def _strip_logarea_closed_form(half_width: float) -> float:
    # For fixed y the inner integral over sqrt(1-y^2) < |x| < X is an arctangent difference.
    def inner(y: float) -> float:
        return 2.0 / y * (math.atan(half_width / y) - math.atan(math.sqrt(1.0 - y * y) / y))

    value, _ = quad(inner, 0.0, 1.0, limit=200)
    return value


def test_logarea_rejects_strip_touching_origin():
    strip = PlanarRegion(-4.0, 4.0, 0.0, 1.0, _strip, resolution=(64, 16))
    assert not strip.contains(np.array([0j]))[0]
    with pytest.raises(ValueError, match="singular integrand"):
        logarea(strip)
    assert logarea(strip, excise_unit_disk=True).finite


def test_logarea_accepts_region_away_from_origin():
    shifted = PlanarRegion(1.0, 3.0, 0.0, 1.0, resolution=64)
    assert logarea(shifted).finite


def test_logarea_of_strip_matches_arctangent_form():
    strip = PlanarRegion(-8.0, 8.0, 0.0, 1.0, _strip, resolution=(2048, 256))
    estimate = logarea(strip, excise_unit_disk=True)
    expected = _strip_logarea_closed_form(8.0)
    assert estimate.finite
    assert estimate.value == pytest.approx(expected, rel=0.01)
    # The full strip tends to pi * log 2 as the width grows.
    assert expected < math.pi * math.log(2.0)
    assert expected == pytest.approx(math.pi * math.log(2.0) - 0.25, abs=0.01)


def test_logarea_is_monotone_under_inclusion():
    upper = PlanarRegion.annulus(1.0, math.e, resolution=512).with_predicate(lambda z: z.imag > 0)
    ring = PlanarRegion.annulus(1.0, math.e, resolution=512)
    wide = PlanarRegion.annulus(1.0, math.e**2, resolution=1024)
    values = [logarea(region).value for region in (upper, ring, wide)]
    assert values[0] < values[1] < values[2]
    assert values[0] == pytest.approx(math.pi, rel=0.03)
    assert values[2] == pytest.approx(4.0 * math.pi, rel=0.03)


def test_twb_on_strip_equals_logarea():
    estimate = twb_finiteness(
        lambda z: np.where(_strip(z), 2.0, 1.0), half_width=8.0, resolution=1024
    )
    strip = PlanarRegion(-8.0, 8.0, -8.0, 8.0, _strip, resolution=1024)
    reference = logarea(strip, excise_unit_disk=True)
    assert estimate.finite
    assert estimate.estimate == pytest.approx(reference.value, rel=1e-9)
    assert estimate.estimate == pytest.approx(_strip_logarea_closed_form(8.0), rel=0.01)


def test_spherical_density_of_unit_disk_in_double_disk():
    # Cap area 4 pi r^2 / (1 + r^2) gives 2 pi over 16 pi / 5.
    density = spherical_density(
        PlanarRegion.disk(0j, 1.0, resolution=64), PlanarRegion.disk(0j, 2.0, resolution=1024)
    )
    assert density == pytest.approx(5.0 / 8.0, abs=0.005)


def test_full_sphere_area_converges():
    errors = []
    for half_width, resolution in ((16.0, 512), (64.0, 2048)):
        square = PlanarRegion(-half_width, half_width, -half_width, half_width, resolution=resolution)
        errors.append(abs(spherical_area(square) - 4.0 * math.pi))
    assert errors[1] < errors[0]
    assert errors[1] < 1e-3 * 4.0 * math.pi
