"""
Ordered worker pool for per-path and per-grid-point work units.

Results always come back in input order, so every reduction downstream is
independent of the number of threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int]) -> int:
    """Thread count from an explicit value or the active configuration."""
    if threads is None:
        from levyclt.config import get_config

        threads = get_config().THREADS or 1
    if threads < 1:
        raise ValueError(f"Thread count must be positive, got {threads}")
    return threads


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """
    Apply func to every item, preserving input order.

    Args:
        func: Pure work function.
        items: Work units.
        threads: Worker count; 1 runs serially in the calling thread.

    Returns:
        List of results in the order of items.
    """
    workers = resolve_threads(threads)
    units = list(items)
    if workers == 1 or len(units) < 2:
        return [func(item) for item in units]

    logger.debug(f"Dispatching {len(units)} work units to {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, units))
