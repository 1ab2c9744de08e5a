"""Ordered fan-out of independent tasks over a process pool."""
import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def map_ordered(fn, tasks, jobs=1):
    """Apply fn to every task; results come back in task order."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    logger.debug(f'Dispatching {len(tasks)} tasks to {jobs} workers')
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))
