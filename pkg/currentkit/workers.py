"""
Worker Pool for CurrentKit

Order-preserving parallel map used by every scan. Results are assembled in
input order, so output never depends on the thread count.

Author: Harsh
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply func to every item, optionally on a thread pool.

    Args:
        func: Pure function of one item
        items: Inputs
        threads: Worker count; 1 or less runs inline

    Returns:
        Results in input order
    """
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [func(item) for item in work]
    logger.debug(f"Mapping {len(work)} items on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, work))
