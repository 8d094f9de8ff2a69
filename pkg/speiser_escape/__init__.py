"""Speiser-class model maps: counting, covering, dimension bounds and escape fields."""

from speiser_escape.elliptic import EllipticFunction, Lattice
from speiser_escape.models import (
    GluedOrderTwo,
    ModelFunction,
    PlainWp,
    PowerLift,
    WpCosh,
    WpExp,
    WpPower,
)
from speiser_escape.schemas import RunConfig

__version__ = "0.1.0"

__all__ = [
    # Lattices and p
    "EllipticFunction",
    "Lattice",
    # Model catalog
    "ModelFunction",
    "PlainWp",
    "WpExp",
    "WpCosh",
    "WpPower",
    "PowerLift",
    "GluedOrderTwo",
    # Run configuration
    "RunConfig",
]
