"""Order-preserving chunked map used by the sweeps and the sampler."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

CHUNK_ROWS = 8


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1


def chunk_bounds(n: int, size: int = CHUNK_ROWS):
    # chunking never depends on the worker count, so results are bitwise stable
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def ordered_map(fn, items, workers: int | None = None):
    items = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
