import os
from concurrent.futures import ThreadPoolExecutor


def max_workers():
    env = os.environ.get("BOSONIC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"BOSONIC_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def pmap(fn, items):
    """Order-preserving map over independent grid points."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
