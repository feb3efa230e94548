"""Fan-out of independent evaluations with results gathered in input order."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from ergoswitch.config import get_settings
from ergoswitch.errors import ParameterRangeError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    max_workers: int | None = None,
) -> list[R]:
    """Apply fn to every item, possibly in parallel, preserving input order.

    numpy releases the GIL inside its linear-algebra kernels, so threads give
    real parallelism for the sweep and optimizer workloads.

    Args:
        fn: Pure function of one item.
        items: Work items.
        max_workers: Worker cap. Defaults to Settings.threads; 1 runs inline.

    Returns:
        fn(item) for every item, in the order the items were given.

    Raises:
        ParameterRangeError: If max_workers is below 1.
    """
    work = list(items)
    workers = max_workers if max_workers is not None else get_settings().threads
    if workers < 1:
        raise ParameterRangeError("ordered_map", "max_workers", workers)

    if workers == 1 or len(work) <= 1:
        return [fn(item) for item in work]

    logger.debug("Evaluating %d items on %d threads", len(work), workers)
    with ThreadPoolExecutor(max_workers=min(workers, len(work))) as pool:
        return list(pool.map(fn, work))


__all__ = ["ordered_map"]
