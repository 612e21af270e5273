"""Deterministic reductions and the per-component fan-out."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def tree_sum(values):
    """Pairwise sum of a sequence of scalars or equally shaped arrays.

    The reduction tree depends only on the number of terms, so the result is
    bitwise identical however the terms were produced.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape[0] == 0:
        return 0.0 if arr.ndim == 1 else np.zeros(arr.shape[1:])
    while arr.shape[0] > 1:
        if arr.shape[0] % 2:
            head = arr[:-1]
            arr = np.concatenate([head[0::2] + head[1::2], arr[-1:]])
        else:
            arr = arr[0::2] + arr[1::2]
    out = arr[0]
    return float(out) if out.ndim == 0 else out


class ComponentPool:
    """Maps a function over component indices, serially or on a thread pool.

    Results are always returned in index order, so downstream reductions do
    not depend on ``n_jobs``.
    """

    def __init__(self, n_jobs=1):
        if n_jobs is None or n_jobs == 0:
            n_jobs = 1
        if n_jobs < 0:
            import os
            n_jobs = os.cpu_count() or 1
        self.n_jobs = int(n_jobs)
        self._executor = ThreadPoolExecutor(self.n_jobs) if self.n_jobs > 1 else None

    def map(self, fn, indices):
        if self._executor is None or len(indices) < 2:
            return [fn(i) for i in indices]
        return list(self._executor.map(fn, indices))

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
