"""
Retry Utilities for CurrentKit

Retries for numerically degenerate choices. Counting needs a base point on
an axis that avoids every endpoint of the lifts in the scan; when a choice
hits one, the computation is repeated with a deterministic jitter.

Author: Harsh
"""

import logging
from typing import Callable, Tuple, Type, TypeVar

from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)

from .errors import DegenerateBasePoint

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_MAX_ATTEMPTS = 20
DEFAULT_JITTER = 1e-3


def create_retrying(
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    exceptions: Tuple[Type[BaseException], ...] = (DegenerateBasePoint,),
) -> Retrying:
    """
    Create a retry controller for degenerate numerical choices.

    No waiting between attempts: the retried work is a pure computation
    whose next attempt differs only by its jitter.

    Args:
        max_attempts: Maximum number of attempts
        exceptions: Exception types that trigger another attempt

    Returns:
        tenacity.Retrying configured with the given parameters

    Example:
        >>> for attempt in create_retrying(max_attempts=5):
        >>>     with attempt:
        >>>         count = count_with_offset(attempt.retry_state.attempt_number)
    """
    return Retrying(
        stop=stop_after_attempt(max_attempts),
        retry=retry_if_exception_type(exceptions),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    )


def call_with_jitter(
    func: Callable[[float], T],
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    jitter: float = DEFAULT_JITTER,
) -> T:
    """
    Call func(offset) until it stops raising DegenerateBasePoint.

    The offset is (attempt_number - 1) * jitter, so the first attempt is
    unperturbed and reruns are reproducible.

    Args:
        func: Computation taking the base-point offset
        max_attempts: Maximum number of attempts
        jitter: Offset added per failed attempt

    Returns:
        The first successful result

    Raises:
        DegenerateBasePoint: if every attempt was degenerate
    """
    result = None
    for attempt in create_retrying(max_attempts):
        with attempt:
            offset = (attempt.retry_state.attempt_number - 1) * jitter
            if offset:
                logger.debug(f"Retrying with base-point offset {offset:.3g}")
            result = func(offset)
    return result  # type: ignore[return-value]
