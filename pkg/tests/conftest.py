"""Shared fixtures: lattices, elliptic functions and seeded generators."""

import numpy as np
import pytest

from speiser_escape.cache import inventory_cache
from speiser_escape.elliptic import EllipticFunction, Lattice


@pytest.fixture
def square_lattice() -> Lattice:
    return Lattice(1.0, 1j)


@pytest.fixture
def generic_lattice() -> Lattice:
    return Lattice(1.0, 0.3 + 1.1j)


@pytest.fixture
def square_wp(square_lattice) -> EllipticFunction:
    return EllipticFunction(square_lattice)


@pytest.fixture
def generic_wp(generic_lattice) -> EllipticFunction:
    return EllipticFunction(generic_lattice)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


@pytest.fixture(autouse=True)
def clear_inventory_cache():
    inventory_cache.clear()
    yield
    inventory_cache.clear()
