"""Deterministic parallel maps and exact integer matrix accumulation."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = ["map_ordered", "default_workers", "exact_AtB", "to_int_array"]

_FLOAT_EXACT = 1 << 52


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def map_ordered(func: Callable, items: Sequence, workers: int = 1) -> list:
    """``[func(x) for x in items]``, optionally spread over processes.

    Output order always follows input order, so reductions over the result
    do not depend on the worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))


def to_int_array(a) -> np.ndarray:
    """Integer array as int64 when every entry fits comfortably, else object."""
    arr = np.asarray(a, dtype=object) if not isinstance(a, np.ndarray) else a
    if arr.dtype != object:
        return arr.astype(np.int64)
    if arr.size == 0:
        return arr.astype(np.int64)
    m = max(abs(int(x)) for x in arr.flat)
    return arr.astype(np.int64) if m < (1 << 62) else arr


def _row_max(a: np.ndarray) -> list[int]:
    if a.dtype == object:
        return [max((abs(int(x)) for x in row), default=0) for row in a]
    return [int(x) for x in np.abs(a).max(axis=1)] if a.shape[1] else [0] * a.shape[0]


def _chunks(bounds: list[int], max_rows: int) -> list[tuple[int, int, bool]]:
    """Split rows greedily so each chunk's accumulated bound stays float-exact."""
    out, start, acc = [], 0, 0
    for k, b in enumerate(bounds):
        if b >= _FLOAT_EXACT:
            if start < k:
                out.append((start, k, True))
            out.append((k, k + 1, False))
            start, acc = k + 1, 0
            continue
        if acc + b >= _FLOAT_EXACT or k - start >= max_rows:
            out.append((start, k, True))
            start, acc = k, 0
        acc += b
    if start < len(bounds):
        out.append((start, len(bounds), True))
    return out


def _chunk_product(args) -> np.ndarray:
    A, B, use_float = args
    if use_float:
        return np.rint(A.astype(np.float64).T @ B.astype(np.float64)).astype(np.int64).astype(object)
    return A.astype(object).T @ B.astype(object)


def exact_AtB(A, B, workers: int = 1, max_rows: int = 4096) -> np.ndarray:
    """Exact ``A^T B`` for integer arrays with rows indexed by the same items.

    Rows are grouped into chunks whose worst-case partial sums are below
    ``2**52``; those chunks go through float64 BLAS, which is then exact.
    Anything larger falls back to Python integers.  Chunk results are added
    in a fixed order as Python integers.
    """
    A = to_int_array(A)
    B = to_int_array(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError("row counts differ")
    ra, rb = _row_max(A), _row_max(B)
    bounds = [x * y for x, y in zip(ra, rb)]
    # entries must themselves be float-exact
    bounds = [b if (x < _FLOAT_EXACT and y < _FLOAT_EXACT) else _FLOAT_EXACT for b, x, y in zip(bounds, ra, rb)]
    tasks = [(A[s:e], B[s:e], fl) for s, e, fl in _chunks(bounds, max_rows)]
    total = np.zeros((A.shape[1], B.shape[1]), dtype=object)
    total[...] = 0
    for part in map_ordered(_chunk_product, tasks, workers):
        total = total + part
    return total
