"""Process-pool helper for per-graph and per-cell work units.

Workers pin their BLAS pools to one thread so jobs > 1 does not
oversubscribe the machine; with jobs <= 1 everything runs inline and BLAS
keeps its default threading. Results preserve input order, so parallel and
sequential runs are identical.
"""

from __future__ import annotations

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor

_worker_limiter = None


def _init_worker():
    global _worker_limiter
    from threadpoolctl import threadpool_limits

    _worker_limiter = threadpool_limits(limits=1)


def resolve_jobs(jobs: int | None) -> int:
    """jobs=None falls back to WALK2VEC_JOBS, then to 1; 0/negative -> cpu count."""
    if jobs is None:
        env = os.environ.get("WALK2VEC_JOBS")
        jobs = int(env) if env else 1
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    return jobs


def parallel_map(fn, items, jobs: int | None = None) -> list:
    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    ctx = multiprocessing.get_context("fork")
    chunksize = max(1, len(items) // (8 * jobs))
    with ProcessPoolExecutor(
        max_workers=min(jobs, len(items)), mp_context=ctx, initializer=_init_worker
    ) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
