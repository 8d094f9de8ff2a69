"""
Commands Package
================
Implementations behind the command-line subcommands.
"""

from .counting import run_counting
from .dim_bound import build_cover, run_dim_bound
from .render import run_render
from .selftest import SUITES, run_selftest

__all__ = [
    # Nevanlinna counting
    "run_counting",
    # Dimension bounds
    "build_cover",
    "run_dim_bound",
    # Escape fields
    "run_render",
    # Self-test battery
    "SUITES",
    "run_selftest",
]
