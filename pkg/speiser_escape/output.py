"""
Artifact Writers
================
CSV tables at full precision and binary pixmaps of escape fields.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from PIL import Image

from speiser_escape.counting import CountingSample
from speiser_escape.mcmullen import BoundSequence, NestedCoverSpec
from speiser_escape.orbits import CLASS_CODES, Classification, EscapeField

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

BOUNDED_COLOR = (0, 0, 0)
PREPOLE_COLOR = (255, 255, 255)
UNDETERMINED_COLOR = (96, 96, 160)
OUTSIDE_COLOR = (32, 32, 32)


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """
    Write a CSV table with floats in shortest round-trip form.

    Raises:
        OSError: If the path cannot be written
    """
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def read_cover_sequences(path: PathLike) -> NestedCoverSpec:
    """Read a nested cover from a CSV with ``delta`` and ``diam`` columns, one row per level."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"delta", "diam"} <= set(reader.fieldnames):
            raise ValueError(f"{path} must have delta and diam columns")
        rows = [(float(r["delta"]), float(r["diam"])) for r in reader]
    deltas, diams = zip(*rows) if rows else ((), ())
    return NestedCoverSpec.from_sequences(deltas, diams)


def write_counting_csv(path: PathLike, cs: CountingSample) -> Path:
    rows = zip(cs.radii, cs.n, cs.N, cs.m, cs.T)
    return write_csv(path, ["r", "n", "N", "m", "T"], rows)


def write_bound_csv(path: PathLike, spec: NestedCoverSpec, bound: BoundSequence) -> Path:
    rows = [
        (int(level), float(spec.deltas[level - 1]), float(spec.diams[level - 1]), float(beta))
        for level, beta in zip(bound.levels, bound.values)
    ]
    return write_csv(path, ["level", "delta", "diam", "bound"], rows)


def write_points_csv(path: PathLike, points: np.ndarray, depths: np.ndarray) -> Path:
    rows = zip(np.real(points), np.imag(points), depths)
    return write_csv(path, ["x", "y", "depth"], rows)


def _ramp(t: np.ndarray) -> np.ndarray:
    """Escaping colors from dark red (shallow) to yellow (deep)."""
    t = np.clip(t, 0.0, 1.0)
    red = np.full(t.shape, 255.0)
    green = 64.0 + 191.0 * t
    blue = np.zeros(t.shape)
    return np.stack([red, green, blue], axis=-1)


def colorize(field: EscapeField) -> np.ndarray:
    """RGB image of an escape field, row 0 at the top."""
    rgb = np.zeros(field.codes.shape + (3,), dtype=np.uint8)
    palette: List[Tuple[Classification, Tuple[int, int, int]]] = [
        (Classification.BOUNDED, BOUNDED_COLOR),
        (Classification.PREPOLE, PREPOLE_COLOR),
        (Classification.UNDETERMINED, UNDETERMINED_COLOR),
    ]
    for cls, color in palette:
        rgb[field.codes == CLASS_CODES[cls]] = color
    escaping = field.codes == CLASS_CODES[Classification.ESCAPING]
    ramp = _ramp(field.depth / max(field.cap, 1))
    rgb[escaping] = ramp[escaping].astype(np.uint8)
    rgb[~field.inside] = OUTSIDE_COLOR
    return rgb


def write_pixmap(path: PathLike, rgb: np.ndarray) -> Path:
    """
    Write a binary portable pixmap: "P6", width, height and 255 as decimal ASCII,
    then the raw RGB rows from top to bottom.
    """
    path = Path(path)
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"Expected an (height, width, 3) array, got {rgb.shape}")
    Image.fromarray(rgb).save(path, format="PPM")
    logger.info(f"Wrote {rgb.shape[1]}x{rgb.shape[0]} pixmap {path}")
    return path
