"""Small shared helpers."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .rng import derive_rng

__all__ = ["parallel_map", "derive_subseed"]


def parallel_map(fn, items, workers: int = 1) -> list:
    """Map fn over items, optionally on a thread pool.

    Results come back in input order; tasks must be independent, so the
    output is identical for any worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def derive_subseed(seed: int, *labels) -> int:
    """A 63-bit integer seed for a labeled child stream."""
    return int(derive_rng(seed, *labels).integers(0, 2**63))
