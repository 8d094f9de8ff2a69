"""
Counting Command
================
Samples n, N, m and T for the configured model and fits the order.
"""

import logging
from pathlib import Path
from typing import Optional

from speiser_escape.counting import estimate_order, log_radii, sample_counting
from speiser_escape.output import write_counting_csv
from speiser_escape.schemas import CountingReport, RunConfig

logger = logging.getLogger(__name__)


def run_counting(config: RunConfig, out: Optional[Path] = None) -> CountingReport:
    """
    Write the counting CSV and return the order-estimate summary.

    Args:
        config: Run configuration
        out: CSV path (falls back to config.output, then counting.csv)

    Returns:
        Order estimate over the configured window
    """
    path = Path(out or config.output or "counting.csv")
    model = config.build_model()
    logger.info(f"Counting poles of {model.variant} on [{config.r_min:g}, {config.r_max:g}]")

    try:
        radii = log_radii(config.r_min, config.r_max, config.radii_per_decade)
        sample = sample_counting(model, radii, config.quadrature_points, config.workers)
        estimate = estimate_order(sample, config.window)
    except ValueError as e:
        logger.error(f"Counting failed for {model.variant}: {e}")
        raise

    write_counting_csv(path, sample)
    return CountingReport(
        variant=model.variant,
        window=list(estimate.window),
        slope=estimate.slope,
        intercept=estimate.intercept,
        residual=estimate.residual,
        points=estimate.points,
        nudged=int(sample.nudged.sum()),
        output=str(path),
    )
