"""
Render Command
==============
Escape-field pixmap plus the CSV of escaping pixel centers.
"""

import logging
from pathlib import Path
from typing import Optional

from speiser_escape.orbits import Classification, render_escape_field
from speiser_escape.output import colorize, write_pixmap, write_points_csv
from speiser_escape.schemas import RenderReport, RunConfig

logger = logging.getLogger(__name__)


def run_render(config: RunConfig, out: Optional[Path] = None) -> RenderReport:
    """
    Render the configured region; the points CSV sits next to the image.

    Args:
        config: Run configuration
        out: Image path (falls back to config.output, then escape.ppm)

    Returns:
        Pixel counts per classification and the written paths
    """
    image_path = Path(out or config.output or "escape.ppm")
    points_path = image_path.with_suffix(".csv")
    model = config.build_model()

    field = render_escape_field(
        model, config.region(), config.build_schedule(), config.cap, config.workers
    )
    write_pixmap(image_path, colorize(field))
    points, depths = field.escaping_points()
    write_points_csv(points_path, points, depths)

    height, width = field.shape
    return RenderReport(
        width=width,
        height=height,
        counts={cls.value: field.count(cls) for cls in Classification},
        image=str(image_path),
        points=str(points_path),
    )
