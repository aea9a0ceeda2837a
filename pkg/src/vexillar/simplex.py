"""Exact two-phase simplex over the rationals with Bland's rule."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["LPResult", "maximize"]


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    pr = T[r]
    pv = pr[c]
    if pv != 1:
        T[r] = pr = [v / pv for v in pr]
    for i, row in enumerate(T):
        if i != r and row[c]:
            f = row[c]
            T[i] = [a - f * b if b else a for a, b in zip(row, pr)]
    basis[r] = c


def _run(T: list[list[Fraction]], basis: list[int], allowed: int) -> str:
    """Maximize the objective stored in the last row as reduced costs ``-c``."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        col = next((j for j in range(allowed) if obj[j] < 0), None)  # Bland: smallest index
        if col is None:
            return "optimal"
        best, row = None, None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best, row = ratio, i
        if row is None:
            return "unbounded"
        _pivot(T, basis, row, col)


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximize ``c.x`` subject to ``A x = b``, ``x >= 0``."""
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    m, nv = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase 1: artificials nv .. nv+m-1
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    T.append([-sum((A[i][j] for i in range(m)), Fraction(0)) for j in range(nv)] + [Fraction(0)] * m
             + [-sum(b, Fraction(0))])
    basis = list(range(nv, nv + m))
    _run(T, basis, nv)
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= nv:
            col = next((j for j in range(nv) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
        i += 1
    T = [row[:nv] + [row[-1]] for row in T[:-1]]
    obj = [-v for v in c] + [Fraction(0)]
    for i, bj in enumerate(basis):
        if obj[bj]:
            f = obj[bj]
            obj = [a - f * r for a, r in zip(obj, T[i])]
    T.append(obj)
    status = _run(T, basis, nv)
    if status != "optimal":
        return LPResult(status)
    x = [Fraction(0)] * nv
    for i, bj in enumerate(basis):
        x[bj] = T[i][-1]
    return LPResult("optimal", x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)))
