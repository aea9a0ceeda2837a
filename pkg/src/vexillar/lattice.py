"""Integral lattices, short vectors, primitive sublattices and minimal flags.

All pruning is done in integers.  With ``Delta_k`` the leading principal
minors of the (LLL-reduced, integer) Gram matrix ``H`` and ``lam_jk`` the
fraction-free LDL multipliers, the quadratic form reads

    q(y) = sum_k t_k^2 / (Delta_k Delta_{k-1}),   t_k = Delta_k y_k + sum_{j>k} lam_jk y_j,

so after scaling by ``L = lcm(Delta_k Delta_{k-1})`` every bound is an integer.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combinatorics import Partition, _as_partition, transpose
from .exactlinalg import (NotPositiveDefinite, RatMatrix, det, hnf, int_kernel, inverse, ldl, lll_gram,
                          projector, saturate)
from .flags import Flag, FlagShape
from .parallel import map_ordered

__all__ = [
    "BudgetExceeded",
    "Lattice",
    "Weight",
    "LatticeFlag",
    "MinimalFlags",
    "short_vectors",
    "minimal_vectors",
    "sublattices_upto",
    "min_sublattice_det",
    "minimal_flags",
    "HERMITE_POWER",
    "DEFAULT_NODE_BUDGET",
]

DEFAULT_NODE_BUDGET = 50_000_000

# gamma_k^k for k = 1..8
HERMITE_POWER = {1: Fraction(1), 2: Fraction(4, 3), 3: Fraction(2), 4: Fraction(4), 5: Fraction(8),
                 6: Fraction(64, 3), 7: Fraction(64), 8: Fraction(256)}


class BudgetExceeded(RuntimeError):
    """An enumeration stopped before completion; results would be partial."""


@dataclass(frozen=True, eq=False)
class Lattice:
    gram: RatMatrix
    name: str = ""
    scale_note: str = ""

    def __post_init__(self):
        g = self.gram if isinstance(self.gram, RatMatrix) else RatMatrix.from_rows(self.gram)
        object.__setattr__(self, "gram", g)
        if g.shape[0] != g.shape[1] or not g.is_symmetric():
            raise NotPositiveDefinite("Gram matrix must be square and symmetric")
        ldl(g)  # raises when not positive definite

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @property
    def det(self) -> Fraction:
        return det(self.gram)

    def norm(self, x: Sequence[int]) -> Fraction:
        v = RatMatrix.from_rows([list(x)])
        return (v @ self.gram @ v.T)[0, 0]

    def sub_gram(self, basis: Sequence[Sequence[int]]) -> RatMatrix:
        B = RatMatrix.from_rows(basis)
        return B @ self.gram @ B.T

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.n, "gram": self.gram.to_json(), "scale_note": self.scale_note}


# -- short vectors ----------------------------------------------------------
class _Enumerator:
    """Integer Fincke-Pohst over an integral positive-definite Gram matrix."""

    def __init__(self, H: list[list[int]], bound: int, node_budget: int):
        n = len(H)
        self.n = n
        Lm, Dm = ldl(RatMatrix.from_rows(H))
        Dd = [Dm[i, i] for i in range(n)]
        delta = [1]
        for k in range(n):
            delta.append(int(delta[-1] * Dd[k]))  # leading minors are integers
        self.delta = delta[1:]
        self.lam = [[0] * n for _ in range(n)]
        for j in range(n):
            for k in range(j):
                v = Lm[j, k] * delta[k + 1]
                if v.denominator != 1:
                    raise ArithmeticError("fraction-free multiplier is not integral")
                self.lam[j][k] = int(v)
        pair = [delta[k + 1] * delta[k] for k in range(n)]
        self.L = math.lcm(*pair)
        self.W = [self.L // p for p in pair]
        self.total = self.L * bound
        self.node_budget = node_budget

    def _range(self, k: int, y: list[int], rem: int) -> tuple[int, int, int]:
        c = sum(self.lam[j][k] * y[j] for j in range(k + 1, self.n))
        T = math.isqrt(rem // self.W[k])
        dk = self.delta[k]
        lo = -((T + c) // dk)  # ceil((-T - c) / dk)
        hi = (T - c) // dk
        return lo, hi, c

    def run(self, prefix: tuple[int, ...]) -> tuple[list[tuple[int, ...]], int]:
        """Vectors extending a fixed top-coordinate prefix (highest index first)."""
        n = self.n
        y = [0] * n
        rem = self.total
        zero_so_far = True
        for idx, v in enumerate(prefix):
            k = n - 1 - idx
            lo, hi, c = self._range(k, y, rem)
            t = self.delta[k] * v + c
            y[k] = v
            rem -= self.W[k] * t * t
            if rem < 0:
                return [], 0
            zero_so_far = zero_so_far and v == 0
        out: list[tuple[int, ...]] = []
        nodes = 0
        budget = self.node_budget

        def rec(k: int, rem: int, zero: bool) -> None:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"short-vector enumeration exceeded {budget} nodes")
            lo, hi, c = self._range(k, y, rem)
            if zero:
                lo = max(lo, 1 if k == 0 else 0)
            if k == 0:
                for v in range(lo, hi + 1):
                    y[0] = v
                    out.append(tuple(y))
                y[0] = 0
                return
            dk, wk = self.delta[k], self.W[k]
            for v in range(lo, hi + 1):
                t = dk * v + c
                y[k] = v
                rec(k - 1, rem - wk * t * t, zero and v == 0)
            y[k] = 0

        start = n - 1 - len(prefix)
        if start < 0:
            if not zero_so_far:
                out.append(tuple(y))
            return out, 0
        rec(start, rem, zero_so_far)
        return out, nodes

    def prefixes(self, depth: int) -> list[tuple[int, ...]]:
        """Top-coordinate prefixes of the given depth that can still extend."""
        out = []
        n = self.n

        def rec(pre: tuple[int, ...], y: list[int], rem: int, zero: bool) -> None:
            if len(pre) == depth:
                out.append(pre)
                return
            k = n - 1 - len(pre)
            lo, hi, c = self._range(k, y, rem)
            if zero:
                lo = max(lo, 0)
            for v in range(lo, hi + 1):
                t = self.delta[k] * v + c
                y[k] = v
                rec(pre + (v,), y, rem - self.W[k] * t * t, zero and v == 0)
            y[k] = 0

        rec((), [0] * n, self.total, True)
        return out


def _enum_task(args):
    enum, prefix = args
    return enum.run(prefix)


def _integral_gram(G: RatMatrix) -> tuple[list[list[int]], int]:
    return G.num.tolist(), G.den


def _canonical_sign(v: Sequence[int]) -> tuple[int, ...]:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-a for a in v)
    return tuple(v)


def short_vectors(L: Lattice, bound, workers: int = 1, node_budget: int = DEFAULT_NODE_BUDGET,
                  with_norms: bool = False):
    """All nonzero ``x`` with ``x^T G x <= bound``, one of each ``+-x`` pair.

    Sorted by norm, then lexicographically; the first nonzero coordinate of
    each vector is positive.
    """
    bound = Fraction(bound)
    if bound <= 0:
        return []
    n = L.n
    Gi, s = _integral_gram(L.gram)
    U, H = lll_gram(Gi, Fraction(99, 100))
    Hi = [[int(x) for x in r] for r in H]
    enum = _Enumerator(Hi, math.floor(bound * s), node_budget)
    depth = min(2, n - 1) if workers > 1 else 0
    prefixes = enum.prefixes(depth) if depth else [()]
    results = map_ordered(_enum_task, [(enum, p) for p in prefixes], workers)
    ys = [v for part, _ in results for v in part]
    if not ys:
        return []
    Uo = np.array(U, dtype=object)
    X = (np.array(ys, dtype=object) @ Uo.T)
    Go = np.array(Gi, dtype=object)
    norms = ((X @ Go) * X).sum(axis=1)
    rows = sorted((Fraction(int(q), s), _canonical_sign([int(a) for a in x])) for q, x in zip(norms, X))
    if with_norms:
        return [(x, q) for q, x in rows]
    return [x for _, x in rows]


def minimal_vectors(L: Lattice, workers: int = 1, node_budget: int = DEFAULT_NODE_BUDGET):
    """Minimum norm and the minimal vectors up to sign."""
    Gi, s = _integral_gram(L.gram)
    _, H = lll_gram(Gi, Fraction(99, 100))
    b = Fraction(min(int(H[i][i]) for i in range(L.n)), s)
    vs = short_vectors(L, b, workers, node_budget, with_norms=True)
    mu = min(q for _, q in vs)
    return mu, [x for x, q in vs if q == mu]


# -- primitive sublattices --------------------------------------------------
def _gram_det(vecs: Sequence[Sequence[int]], G: RatMatrix) -> Fraction:
    return det(RatMatrix.from_rows(vecs) @ G @ RatMatrix.from_rows(vecs).T)


def _root_ceil(x: Fraction, c: int) -> Fraction:
    """Rational ``r >= x^(1/c)``, exact when ``x`` is a perfect power."""
    if c == 1:
        return x
    num, den = x.numerator, x.denominator
    # x^(1/c) = (num * den^(c-1))^(1/c) / den
    m = num * den ** (c - 1)
    r = int(round(m ** (1.0 / c)))
    while r ** c < m:
        r += 1
    while r > 0 and (r - 1) ** c >= m:
        r -= 1
    return Fraction(r, den)


def sublattices_upto(L: Lattice, k: int, D, workers: int = 1,
                     node_budget: int = DEFAULT_NODE_BUDGET, max_candidates: int = 20_000_000):
    """Primitive rank-``k`` sublattices with determinant at most ``D``.

    Returns sorted ``(det, hnf_rows)`` pairs.  Every such sublattice has ``k``
    independent vectors of norm at most ``lambda_k^2 <= gamma_k^k D / mu^(k-1)``
    (successive minima), and those span a sublattice whose determinant is at
    most ``gamma_k^k D`` (Hadamard); saturating recovers the sublattice.  For
    ``k <= 4`` a basis attains the minima, which tightens the filter to ``D``.
    When ``k > n/2`` the dual lattice is searched instead.
    """
    n = L.n
    D = Fraction(D)
    if not 1 <= k <= n:
        raise ValueError(f"rank must be in 1..{n}")
    if D <= 0:
        return []
    if k == n:
        d = L.det
        return [(d, [[int(i == j) for j in range(n)] for i in range(n)])] if d <= D else []
    if k > n - k:
        dual = Lattice(inverse(L.gram))
        dl = L.det
        out = []
        for dd, rows in sublattices_upto(dual, n - k, D / dl, workers, node_budget, max_candidates):
            basis = [list(r) for r in hnf(int_kernel(rows)).int_rows()]
            out.append((dd * dl, basis))
        return sorted(out, key=lambda t: (t[0], t[1]))
    if k not in HERMITE_POWER:
        raise ValueError("ranks above 8 are not supported")
    mu, _ = minimal_vectors(L, 1, node_budget)
    R = HERMITE_POWER[k] * D / mu ** (k - 1)
    vecs = short_vectors(L, R, workers, node_budget)
    if k == 1:
        out = []
        for v in vecs:
            if math.gcd(*v) == 1:
                q = L.norm(v)
                if q <= D:
                    out.append((q, [list(v)]))
        return sorted(out, key=lambda t: (t[0], t[1]))
    span_bound = D if k <= 4 else HERMITE_POWER[k] * D
    G = L.gram
    V = np.array(vecs, dtype=object)
    Gram = V @ G.num @ V.T  # numerators over G.den
    found: dict[tuple, Fraction] = {}
    checked = 0
    m = len(vecs)

    def extend(idx: list[int]) -> None:
        nonlocal checked
        if len(idx) == k:
            checked += 1
            if checked > max_candidates:
                raise BudgetExceeded(f"more than {max_candidates} candidate spans")
            sub = RatMatrix(Gram[np.ix_(idx, idx)], G.den)
            dm = det(sub)
            if dm == 0 or dm > span_bound:
                return
            sat = saturate([list(vecs[i]) for i in idx])
            key = tuple(tuple(r) for r in sat)
            if key not in found:
                found[key] = _gram_det(sat, G)
            return
        start = idx[-1] + 1 if idx else 0
        for j in range(start, m):
            if len(idx) == 1:
                a = idx[0]
                d2 = Fraction(int(Gram[a, a] * Gram[j, j] - Gram[a, j] ** 2), G.den ** 2)
                if d2 == 0 or (k == 2 and d2 > span_bound):
                    continue
            extend(idx + [j])

    if k == 2:
        # vectorized 2x2 determinant prefilter
        diag = np.array([Gram[i, i] for i in range(m)], dtype=object)
        for a in range(m):
            d2 = diag[a] * diag[a + 1:] - Gram[a, a + 1:] ** 2
            ok = [a + 1 + int(j) for j in np.nonzero((d2 > 0) & (d2 <= span_bound * G.den ** 2))[0]]
            checked += len(ok)
            if checked > max_candidates:
                raise BudgetExceeded(f"more than {max_candidates} candidate spans")
            for j in ok:
                sat = saturate([list(vecs[a]), list(vecs[j])])
                key = tuple(tuple(r) for r in sat)
                if key not in found:
                    found[key] = _gram_det(sat, G)
    else:
        extend([])
    out = [(d, [list(r) for r in key]) for key, d in found.items() if d <= D]
    return sorted(out, key=lambda t: (t[0], t[1]))


def min_sublattice_det(L: Lattice, k: int, workers: int = 1, node_budget: int = DEFAULT_NODE_BUDGET) -> Fraction:
    """Smallest determinant of a rank-``k`` sublattice."""
    if k == L.n:
        return L.det
    Gi, s = _integral_gram(L.gram)
    U, _ = lll_gram(Gi, Fraction(99, 100))
    first = [[U[r][c] for r in range(L.n)] for c in range(k)]
    ub = _gram_det(first, L.gram)
    subs = sublattices_upto(L, k, ub, workers, node_budget)
    return min(d for d, _ in subs)


# -- weights and minimal flags ----------------------------------------------
@dataclass(frozen=True)
class Weight:
    lam: Partition

    def __post_init__(self):
        lam = _as_partition(self.lam)
        if not lam.parts:
            raise ValueError("empty weight")
        object.__setattr__(self, "lam", lam)

    @property
    def ranks(self) -> tuple[int, ...]:
        """Transpose parts, largest first (the chain ranks with repetition)."""
        return transpose(self.lam).parts

    @property
    def size(self) -> int:
        return self.lam.degree

    def rank_multiplicities(self) -> list[tuple[int, int]]:
        out: list[tuple[int, int]] = []
        for r in self.ranks:
            if out and out[-1][0] == r:
                out[-1] = (r, out[-1][1] + 1)
            else:
                out.append((r, 1))
        return out

    def shape(self, n: int) -> FlagShape:
        return FlagShape(tuple(r for r, _ in self.rank_multiplicities()), n)

    def check(self, n: int) -> None:
        if self.ranks[0] >= n:
            raise ValueError(f"weight {self.lam} needs chain ranks below n = {n}")


@dataclass(frozen=True, eq=False)
class LatticeFlag:
    """Chain of primitive sublattices, one HNF basis per distinct rank (largest first)."""

    lattice: Lattice
    weight: Weight
    bases: tuple[tuple[tuple[int, ...], ...], ...]
    dets: tuple[Fraction, ...]

    @property
    def product(self) -> Fraction:
        out = Fraction(1)
        for d, (_, c) in zip(self.dets, self.weight.rank_multiplicities()):
            out *= d ** c
        return out

    def flag(self) -> Flag:
        n = self.lattice.n
        projs = tuple(projector(RatMatrix.from_rows([list(r) for r in B]).T, self.lattice.gram) for B in self.bases)
        return Flag(self.weight.shape(n), projs, self.lattice.gram, check=False)

    def key(self):
        return self.bases

    def to_json(self) -> dict:
        return {"bases": [[list(r) for r in B] for B in self.bases], "dets": [str(d) for d in self.dets]}


@dataclass
class MinimalFlags:
    lattice: Lattice
    weight: Weight
    flags: list[LatticeFlag]
    min_product: Fraction
    det_lattice: Fraction
    stats: dict = field(default_factory=dict)

    @property
    def s(self) -> int:
        return len(self.flags)

    @property
    def gamma(self) -> tuple[Fraction, Fraction, Fraction]:
        """``(prod det, det L, |lambda|/n)``: gamma = prod / detL^exponent."""
        return self.min_product, self.det_lattice, Fraction(self.weight.size, self.lattice.n)

    def gamma_float(self) -> float:
        p, d, e = self.gamma
        return float(p) / float(d) ** float(e)


def _chains(G: RatMatrix, ranks: list[tuple[int, int]], UB: Fraction, lower: list[Fraction],
            workers: int, node_budget: int) -> list[tuple[Fraction, list[list[list[int]]], list[Fraction]]]:
    """Chains of primitive sublattices of the lattice with Gram ``G`` with product <= UB.

    ``lower[i]`` is a lower bound for the determinant of any rank ``ranks[i]``
    sublattice.  Bases are returned in the coordinates of ``G``.
    """
    (r, c), rest = ranks[0], ranks[1:]
    rest_lb = Fraction(1)
    for (rr, cc), lb in zip(rest, lower[1:]):
        rest_lb *= lb ** cc
    cap = UB / rest_lb
    D = _root_ceil(cap, c)
    L = Lattice(G)
    subs = [(d, B) for d, B in sublattices_upto(L, r, D, 1, node_budget) if d ** c <= cap]
    if not rest:
        return [(d ** c, [B], [d]) for d, B in subs]
    tasks = [(d, B, G, rest, UB / d ** c, lower[1:], node_budget) for d, B in subs]
    out = []
    for (d, B, *_), sub in zip(tasks, map_ordered(_chain_task, tasks, workers)):
        for p, bases, dets in sub:
            mapped = [[list(map(int, np.array(b, dtype=object) @ np.array(B, dtype=object))) for b in basis]
                      for basis in bases]
            out.append((d ** c * p, [B] + mapped, [d] + dets))
    return out


def _chain_task(args):
    d, B, G, rest, ub, lower, node_budget = args
    sub = RatMatrix.from_rows(B) @ G @ RatMatrix.from_rows(B).T
    return _chains(sub, rest, ub, lower, 1, node_budget)


def minimal_flags(L: Lattice, weight, workers: int = 1, node_budget: int = DEFAULT_NODE_BUDGET,
                  max_rounds: int = 64) -> MinimalFlags:
    """All chains of primitive sublattices minimizing the determinant product."""
    W = weight if isinstance(weight, Weight) else Weight(_as_partition(weight))
    W.check(L.n)
    ranks = W.rank_multiplicities()
    lower = [min_sublattice_det(L, r, workers, node_budget) for r, _ in ranks]
    LB = Fraction(1)
    for (_, c), m in zip(ranks, lower):
        LB *= m ** c
    # explicit chain from the reduced basis bounds the search from above
    Gi, _ = _integral_gram(L.gram)
    U, _ = lll_gram(Gi, Fraction(99, 100))
    UB0 = Fraction(1)
    for r, c in ranks:
        UB0 *= _gram_det([[U[a][b] for a in range(L.n)] for b in range(r)], L.gram) ** c
    UB = LB
    for rnd in range(max_rounds):
        UB = min(UB, UB0)
        found = _chains(L.gram, ranks, UB, lower, workers, node_budget)
        if found:
            best = min(p for p, _, _ in found)
            flags = []
            for p, bases, dets in found:
                if p == best:
                    canon = tuple(tuple(tuple(r) for r in hnf(b).int_rows()) for b in bases)
                    flags.append(LatticeFlag(L, W, canon, tuple(dets)))
            flags.sort(key=lambda f: f.bases)
            return MinimalFlags(L, W, flags, best, L.det, {"rounds": rnd + 1, "search_bound": str(UB),
                                                            "lower_bound": str(LB)})
        if UB >= UB0:
            break
        UB *= 2
    raise BudgetExceeded("no chain found below the explicit upper bound; enumeration incomplete")
