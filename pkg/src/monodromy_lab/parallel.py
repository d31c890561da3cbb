"""Optional thread-pool mapping, capped by MONODROMY_LAB_THREADS.

All shared data in this library is immutable, so face checks and sweep rows
may run concurrently; with the default cap of 1 everything stays sequential.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("MONODROMY_LAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    cap = thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))
