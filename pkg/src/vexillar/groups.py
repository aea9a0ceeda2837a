"""Finite rational orthogonal groups, flag orbits and invariant counts.

Elements are kept as integer numerator arrays over a positive denominator,
gcd-normalized, so equality and hashing are exact.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import partitions_of
from .design import FlagSet
from .exactlinalg import RatMatrix
from .flags import Flag

__all__ = [
    "GroupError",
    "GroupOverflow",
    "MatGroup",
    "ClassData",
    "close",
    "orbit",
    "power_traces",
    "class_data",
    "signed_permutation_class_data",
    "signed_permutation_generators",
    "sym_sym_character",
    "sym_sym_invariant_dim",
    "reference_invariant_dim",
    "orbit_design_strength",
    "DEFAULT_MAX_ORDER",
]

DEFAULT_MAX_ORDER = 10 ** 6


class GroupError(ValueError):
    pass


class GroupOverflow(GroupError):
    pass


def _normalize(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    g = math.gcd(int(np.gcd.reduce(np.abs(num).ravel())), den)
    if g > 1:
        num, den = num // g, den // g
    return num, den


class _Elt:
    __slots__ = ("num", "den", "key")

    def __init__(self, num: np.ndarray, den: int):
        self.num, self.den = _normalize(num.astype(np.int64), int(den))
        self.key = (self.den, self.num.tobytes())

    def __mul__(self, other: "_Elt") -> "_Elt":
        return _Elt(self.num @ other.num, self.den * other.den)

    def ratmatrix(self) -> RatMatrix:
        return RatMatrix.from_int_array(self.num, self.den)


def _to_elt(M) -> _Elt:
    R = M if isinstance(M, RatMatrix) else RatMatrix.from_rows(M)
    return _Elt(np.array(R.num, dtype=np.int64), R.den)


@dataclass
class MatGroup:
    n: int
    generators: list[RatMatrix]
    elements: list[RatMatrix] | None = None
    metric: RatMatrix | None = None
    _elts: list = field(default=None, repr=False)

    @property
    def order(self) -> int:
        if self.elements is None:
            raise GroupError("group not enumerated")
        return len(self.elements)


def _check_orthogonal(M: RatMatrix, metric: RatMatrix | None) -> None:
    G = RatMatrix.identity(M.shape[0]) if metric is None else metric
    if M.T @ G @ M != G:
        raise GroupError("generator is not orthogonal")


def close(generators: Sequence, max_order: int = DEFAULT_MAX_ORDER, metric=None) -> MatGroup:
    """Breadth-first closure; elements sorted canonically."""
    gens = [g if isinstance(g, RatMatrix) else RatMatrix.from_rows(g) for g in generators]
    if not gens:
        raise GroupError("no generators")
    n = gens[0].shape[0]
    if metric is not None and not isinstance(metric, RatMatrix):
        metric = RatMatrix.from_rows(metric)
    for g in gens:
        if g.shape != (n, n):
            raise GroupError("generator sizes differ")
        _check_orthogonal(g, metric)
    gel = [_to_elt(g) for g in gens]
    ident = _Elt(np.eye(n, dtype=np.int64), 1)
    seen = {ident.key: ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gel:
            y = x * g
            if y.key not in seen:
                seen[y.key] = y
                if len(seen) > max_order:
                    raise GroupOverflow(f"closure exceeds max_order={max_order}")
                queue.append(y)
    elts = sorted(seen.values(), key=lambda e: (e.den, tuple(e.num.ravel().tolist())))
    return MatGroup(n, gens, [e.ratmatrix() for e in elts], metric, elts)


def orbit(F: Flag, G: MatGroup) -> FlagSet:
    """Distinct images ``g F`` with uniform weights."""
    if G.elements is None:
        raise GroupError("group not enumerated")
    if F.n != G.n:
        raise GroupError("ambient dimensions differ")
    seen: dict = {}
    for g in G.elements:
        gi = g.T if G.metric is None else None
        img = F.transform(g, gi)
        key = tuple((P.den, tuple(P.num.ravel().tolist())) for P in img.projectors)
        if key not in seen:
            seen[key] = img
    return FlagSet.from_flags(list(seen.values()))


@dataclass(frozen=True)
class ClassData:
    """Power traces ``tr(g^j)`` for ``j = 1..len`` aggregated by class size."""

    n: int
    order: int
    classes: tuple[tuple[int, tuple[Fraction, ...]], ...]

    def __post_init__(self):
        if sum(s for s, _ in self.classes) != self.order:
            raise GroupError("class sizes do not sum to the group order")

    @property
    def max_power(self) -> int:
        return min(len(t) for _, t in self.classes)

    def to_json(self) -> dict:
        return {"n": self.n, "order": self.order,
                "classes": [{"size": s, "power_traces": [str(x) for x in t]} for s, t in self.classes]}

    @classmethod
    def from_json(cls, obj) -> "ClassData":
        classes = tuple((int(c["size"]), tuple(Fraction(x) for x in c["power_traces"])) for c in obj["classes"])
        return cls(int(obj["n"]), int(obj["order"]), classes)


def power_traces(g: RatMatrix, upto: int) -> tuple[Fraction, ...]:
    e = _to_elt(g)
    out, p = [], e
    for _ in range(upto):
        out.append(Fraction(int(np.trace(p.num)), p.den))
        p = p * e
    return tuple(out)


def class_data(G: MatGroup, upto: int = 6) -> ClassData:
    """Group elements by their power-trace tuple (characters only see these)."""
    if G.elements is None:
        raise GroupError("group not enumerated")
    cnt = Counter(power_traces(g, upto) for g in G.elements)
    return ClassData(G.n, G.order, tuple(sorted(((c, t) for t, c in cnt.items()), key=lambda x: x[1])))


def signed_permutation_generators(n: int) -> list[RatMatrix]:
    """Adjacent transpositions and one sign change."""
    gens = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append(RatMatrix.from_rows([[int(p[r] == c) for c in range(n)] for r in range(n)]))
    gens.append(RatMatrix.diag([-1] + [1] * (n - 1)))
    return gens


def signed_permutation_class_data(n: int, upto: int = 6) -> ClassData:
    """Class data of the hyperoctahedral group from signed cycle types.

    A class is a pair of partitions (positive cycles, negative cycles).  Its
    size is ``n! 2^n / prod_L (a_L! b_L! (2L)^(a_L + b_L))``; a cycle of length
    ``L`` and sign ``e`` contributes ``L e^(j/L)`` to ``tr(g^j)`` when ``L | j``.
    """
    order = math.factorial(n) * 2 ** n
    classes = []
    for k in range(n + 1):
        for alpha in partitions_of(k):
            for beta in partitions_of(n - k):
                a, b = Counter(alpha.parts), Counter(beta.parts)
                denom = 1
                for L in set(a) | set(b):
                    denom *= math.factorial(a[L]) * math.factorial(b[L]) * (2 * L) ** (a[L] + b[L])
                tr = []
                for j in range(1, upto + 1):
                    s = sum(L * c for L, c in a.items() if j % L == 0)
                    s += sum(L * c * (-1) ** (j // L) for L, c in b.items() if j % L == 0)
                    tr.append(Fraction(s))
                classes.append((order // denom, tuple(tr)))
    return ClassData(n, order, tuple(classes))


def sym_sym_character(traces: Sequence[Fraction], k: int) -> Fraction:
    """Character of ``Sym^k(Sym^2 V)`` from ``tr(g^j)``, ``j <= 2k``."""
    if len(traces) < 2 * k:
        raise GroupError(f"need power traces up to {2 * k}")
    tr = lambda j: Fraction(traces[j - 1])  # noqa: E731
    p = [None] + [(tr(j) ** 2 + tr(2 * j)) / 2 for j in range(1, k + 1)]
    h = [Fraction(1)]
    for m in range(1, k + 1):
        h.append(sum((p[j] * h[m - j] for j in range(1, m + 1)), Fraction(0)) / m)
    return h[k]


def sym_sym_invariant_dim(G, k: int) -> int:
    """Multiplicity of the trivial character in ``Sym^k(Sym^2 R^n)``."""
    if not 1 <= k <= 3:
        raise GroupError("k must be 1, 2 or 3")
    if isinstance(G, MatGroup):
        G = class_data(G, 2 * k)
    total = sum((s * sym_sym_character(t, k) for s, t in G.classes), Fraction(0))
    avg = total / G.order
    if avg.denominator != 1 or avg < 0:
        raise GroupError(f"character average {avg} is not a nonnegative integer")
    return int(avg)


def reference_invariant_dim(n: int, k: int) -> int:
    """Invariant dimension for the full orthogonal group: partitions of k with parts <= n."""
    return sum(1 for _ in partitions_of(k, n))


def orbit_design_strength(G, t: int, shape=None) -> bool:
    """Whether every flag orbit of ``G`` is a ``t``-design (``t`` even, at most 6)."""
    if t not in (2, 4, 6):
        raise GroupError("strength must be 2, 4 or 6")
    n = G.n
    return all(sym_sym_invariant_dim(G, k) == reference_invariant_dim(n, k) for k in range(1, t // 2 + 1))


def invariant_report(G, t: int) -> dict:
    n = G.n
    rows = []
    for k in range(1, t // 2 + 1):
        rows.append({"k": k, "invariant_dim": sym_sym_invariant_dim(G, k), "reference_dim": reference_invariant_dim(n, k)})
    return {"strength": t, "degrees": rows, "verdict": all(r["invariant_dim"] == r["reference_dim"] for r in rows)}
