"""Worker pool for independent replicate tasks."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from src.core.config import get_config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ReplicatePool:
    """
    Runs independent tasks on a thread pool and returns results in submission order.

    Results are placed by task index, so the output never depends on completion order
    or on the number of workers.
    """

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers or get_config().threads

    def map_ordered(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """Apply func to every item, in parallel when more than one worker is configured."""
        if self.max_workers <= 1 or len(items) <= 1:
            return [func(item) for item in items]

        results: List[Optional[R]] = [None] * len(items)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {executor.submit(func, item): index for index, item in enumerate(items)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        logger.debug(f"completed {len(items)} tasks on {self.max_workers} workers")
        return results
