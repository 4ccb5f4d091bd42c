"""Deterministic worker-pool helpers.

Units of work carry their own RNG streams, so results are identical for
any worker count; outputs are always collected in input order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count(default: int | None = None) -> int:
    env = os.environ.get("HYPERMINE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    if default is not None:
        return default
    return max(1, os.cpu_count() or 1)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Map preserving input order; sequential when one worker suffices."""
    items = list(items)
    workers = worker_count() if workers is None else max(1, workers)
    workers = min(workers, len(items)) or 1
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
