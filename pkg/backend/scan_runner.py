"""
Concurrent per-n fan-out for the CLI scans.

Every job is CPU-bound numpy/scipy work; jobs run in worker threads under a
semaphore and come back sorted by n so reports do not depend on completion
order.
"""

import asyncio
import logging
import time
from typing import Any, Callable, Iterable, List, Optional, TypeVar

from backend.config import get_config

logger = logging.getLogger("szego_lab.cli")

T = TypeVar("T")


async def run_per_n(
    job: Callable[[int], T],
    n_values: Iterable[int],
    workers: Optional[int] = None,
    label: str = "scan",
) -> List[T]:
    """job(n) for every n, at most ``workers`` at a time, results in ascending n"""
    workers = get_config().scan.workers if workers is None else workers
    ordered = sorted(set(int(n) for n in n_values))
    semaphore = asyncio.Semaphore(max(1, workers))

    async def one(n: int) -> T:
        async with semaphore:
            started = time.perf_counter()
            result = await asyncio.to_thread(job, n)
            logger.debug(
                f"{label} n={n} done",
                extra={"n": n, "kind": label, "duration_ms": (time.perf_counter() - started) * 1000},
            )
            return result

    # gather keeps the input order, which is already ascending n
    return list(await asyncio.gather(*(one(n) for n in ordered)))


def run_scan(job: Callable[[int], Any], n_values: Iterable[int], workers: Optional[int] = None, label: str = "scan") -> List[Any]:
    """Blocking wrapper for synchronous callers"""
    return asyncio.run(run_per_n(job, n_values, workers, label))
