"""
Dimension Bound Command
=======================
Builds a nested cover, evaluates the lower-bound sequence and compares its limit
with 2 rho / (1 + rho).
"""

import logging
from pathlib import Path
from typing import Optional

from speiser_escape.mcmullen import (
    NestedCoverSpec,
    dimension_formula,
    escaping_cover_spec,
    mcmullen_bound,
    paper_cover_spec,
    wpexp_cover_spec,
)
from speiser_escape.output import read_cover_sequences, write_bound_csv
from speiser_escape.schemas import CoverKind, DimBoundReport, RunConfig

logger = logging.getLogger(__name__)


def build_cover(config: RunConfig) -> NestedCoverSpec:
    """Nested cover selected by ``config.cover``."""
    if config.cover is CoverKind.PAPER:
        return paper_cover_spec(config.rho, config.escape_radius, config.c2, config.c7, config.levels)
    if config.cover is CoverKind.ESCAPING:
        return escaping_cover_spec(config.rho, config.c8, config.c9, config.levels)
    if config.cover is CoverKind.WPEXP:
        return wpexp_cover_spec(config.escape_radius, config.a4, config.a5, config.levels)
    return read_cover_sequences(config.sequence_file)


def run_dim_bound(config: RunConfig, out: Optional[Path] = None) -> DimBoundReport:
    """
    Write the per-level bound table and return the limit next to its target.

    The target is 2 for the exponential cover (infinite order).
    """
    path = Path(out or config.output or "dim_bound.csv")
    try:
        spec = build_cover(config)
        bound = mcmullen_bound(spec)
    except ValueError as e:
        logger.error(f"Dimension bound failed for the {config.cover.value} cover: {e}")
        raise

    target = 2.0 if config.cover is CoverKind.WPEXP else dimension_formula(config.rho)
    write_bound_csv(path, spec, bound)
    logger.info(f"Bound limit {bound.limit:.6f} against target {target:.6f}")
    return DimBoundReport(
        cover=config.cover.value,
        limit=bound.limit,
        tail_max=bound.tail_max,
        extrapolated=bound.extrapolated,
        monotone=bound.monotone,
        target=target,
        gap=abs(bound.limit - target),
        output=str(path),
    )
