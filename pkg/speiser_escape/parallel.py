"""
Row-partitioned grid work.

Grids are split into blocks of consecutive rows, processed on a thread pool and
reassembled in row order, so results never depend on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

from speiser_escape.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")


def row_blocks(n_rows: int, block: Optional[int] = None) -> List[tuple[int, int]]:
    """Split ``range(n_rows)`` into consecutive ``(start, stop)`` blocks."""
    size = max(1, block or settings.row_block)
    return [(start, min(start + size, n_rows)) for start in range(0, n_rows, size)]


def map_row_blocks(
    func: Callable[[int, int], T],
    n_rows: int,
    workers: Optional[int] = None,
    block: Optional[int] = None,
) -> List[T]:
    """
    Apply ``func(start, stop)`` to every row block and return results in row order.

    Args:
        func: Work function for one block of rows
        n_rows: Total number of rows
        workers: Thread count (defaults to settings.workers)
        block: Rows per block (defaults to settings.row_block)

    Returns:
        Per-block results ordered by starting row
    """
    blocks = row_blocks(n_rows, block)
    n_workers = max(1, workers or settings.workers)
    logger.debug(f"Dispatching {len(blocks)} row blocks to {n_workers} workers")
    if n_workers == 1 or len(blocks) == 1:
        return [func(start, stop) for start, stop in blocks]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(func, start, stop) for start, stop in blocks]
        return [future.result() for future in futures]
