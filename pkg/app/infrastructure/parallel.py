import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    workers = settings.WORKERS if workers is None else workers
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def fan_out(worker: Callable[[T], R], tasks: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply a top-level (picklable) worker to every task, in input order.

    Results never depend on the worker count: each task carries its own seed.
    """
    tasks = list(tasks)
    workers = min(resolve_workers(workers), max(1, len(tasks)))
    if workers == 1:
        return [worker(task) for task in tasks]
    logger.debug("fanning %d tasks out to %d processes", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(worker, tasks))
