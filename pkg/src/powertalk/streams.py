"""Seeded random streams and an order-preserving parallel map.

Every task gets its own generator derived from ``(seed, task index)``, so
results do not depend on how many workers run the tasks.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def task_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def pmap(fn, items, workers=1):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
