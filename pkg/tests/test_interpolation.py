import numpy as np
import pytest

from speiser_escape.interpolation import (
    IdentityBoundary,
    InterpolationStack,
    SampledBoundary,
    SineBoundary,
    dilatation,
    interpolation_map,
)


@pytest.fixture
def stack() -> InterpolationStack:
    return InterpolationStack(1.5, 1.0, 0.0, SineBoundary(0.05), SineBoundary(0.1, 0.25))


def test_strip_map_matches_boundary_maps(stack):
    x = np.linspace(-2.0, 2.0, 101)
    bottom = interpolation_map(stack, x + 0j)
    top = interpolation_map(stack, x + 1j * stack.depth)
    assert np.allclose(bottom, stack.chi1(x))
    assert np.allclose(top, stack.chi2(x) + 1j * stack.height)


def test_jacobian_matches_central_differences(stack, rng):
    z = rng.uniform(-2, 2, 100) + 1j * rng.uniform(0.01, 0.99, 100)
    h = 1e-6
    dx = (interpolation_map(stack, z + h) - interpolation_map(stack, z - h)) / (2 * h)
    dy = (interpolation_map(stack, z + 1j * h) - interpolation_map(stack, z - 1j * h)) / (2 * h)
    numeric = dx.real * dy.imag - dx.imag * dy.real
    assert np.max(np.abs(numeric - stack.jacobian(z))) < 1e-6


def test_identity_stack_is_conformal(rng):
    z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(0, 1, 50)
    assert np.allclose(dilatation(InterpolationStack.identity(), z), 1.0, atol=1e-12)


def test_displaced_stack_is_quasiconformal(stack, rng):
    z = rng.uniform(-1, 1, 200) + 1j * rng.uniform(0, 1, 200)
    k = dilatation(stack, z)
    assert np.all(k >= 1.0)
    assert np.max(k) > 1.0
    assert np.all(np.isfinite(k))


def test_stack_map_is_continuous_across_strip_top(stack):
    x = np.linspace(-1.0, 1.0, 21)
    below = stack.stack_map(x + 1j * (stack.depth - 1e-9))
    above = stack.stack_map(x + 1j * (stack.depth + 1e-9))
    assert np.max(np.abs(below - above)) < 1e-7


def test_stack_inverse_recovers_points(stack, rng):
    z = rng.uniform(-2, 2, 100) + 1j * rng.uniform(0, 3, 100)
    assert np.allclose(stack.stack_inverse(stack.stack_map(z)), z, atol=1e-10)


def test_points_outside_strip_rejected(stack):
    with pytest.raises(ValueError, match="outside interpolation strip"):
        interpolation_map(stack, 0.5 + 2j)
    with pytest.raises(ValueError, match="outside interpolation strip"):
        dilatation(stack, 0.5 - 0.1j)


def test_strip_base_must_lie_below_heights():
    with pytest.raises(ValueError, match="Strip base"):
        InterpolationStack(1.0, 1.0, 1.0, IdentityBoundary(), IdentityBoundary())


def test_sine_amplitude_limit():
    with pytest.raises(ValueError, match="monotonicity"):
        SineBoundary(0.2)


def test_sampled_boundary_commutes_with_translation():
    chi = SampledBoundary([0.0, 0.05, 0.0, -0.05, 0.0, 0.02])
    x = np.linspace(-1.0, 1.0, 33)
    assert np.allclose(chi(x + 1.0), chi(x) + 1.0)
    assert np.allclose(chi.inverse(chi(x)), x, atol=1e-10)


def test_sampled_boundary_rejects_folds():
    with pytest.raises(ValueError, match="not strictly increasing"):
        SampledBoundary([0.0, 0.6, -0.6, 0.0])
