from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def parallel_map(func, items, workers: int | None = None) -> list:
    """Ordered map, optionally over a process pool; results keep input order."""
    items = list(items)
    if not workers or workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
