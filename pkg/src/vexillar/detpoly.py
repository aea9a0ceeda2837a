"""Sparse polynomials in the entries ``x_{i,j}`` of a generic ``n x m`` matrix.

Monomials are keyed by a sorted tuple of ``((i, j), exponent)`` pairs (1-based
row-major order).  Coefficients are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping

from .combinatorics import Bitableau, _as_partition, kappa_t, partitions_of, standard_tableaux
from .exactlinalg import rank_mod_p, int_rank

__all__ = [
    "Polynomial",
    "det_monomial",
    "scalar_product",
    "shape_in_ideal",
    "standard_bitableaux",
    "standard_monomials_independent",
    "monomial_space_dim",
    "SizeGuardExceeded",
    "MAX_DEGREE",
    "MAX_DIM",
]

MAX_DEGREE = 4
MAX_DIM = 3

Monomial = tuple  # tuple[tuple[tuple[int, int], int], ...]


class SizeGuardExceeded(ValueError):
    pass


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a)
    for var, e in b:
        d[var] = d.get(var, 0) + e
    return tuple(sorted(d.items()))


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def var(cls, i: int, j: int) -> "Polynomial":
        return cls({(((i, j), 1),): Fraction(1)})

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls({(): Fraction(c)})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial({k: c * v for k, v in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = _mono_mul(ka, kb)
                out[k] = out.get(k, 0) + va * vb
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {sum(e for _, e in k) for k in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        return len(ds) <= 1 and (degree is None or not ds or ds == {degree})

    def support_vars(self) -> set[tuple[int, int]]:
        return {var for k in self.terms for var, _ in k}

    def to_json(self) -> list[dict]:
        return [
            {"exponents": [[i, j, e] for (i, j), e in k], "numerator": v.numerator, "denominator": v.denominator}
            for k, v in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, items: Iterable[dict]) -> "Polynomial":
        terms = {}
        for it in items:
            k = tuple(sorted(((int(i), int(j)), int(e)) for i, j, e in it["exponents"]))
            terms[k] = terms.get(k, 0) + Fraction(int(it["numerator"]), int(it["denominator"]))
        return cls(terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items()):
            mono = "*".join(f"x{i}{j}" + (f"^{e}" if e > 1 else "") for (i, j), e in k) or "1"
            parts.append(f"{v}*{mono}")
        return " + ".join(parts)


def _perm_sign(p: tuple[int, ...]) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _minor(rows: tuple[int, ...], cols: tuple[int, ...]) -> Polynomial:
    out: dict[Monomial, Fraction] = {}
    k = len(rows)
    for p in itertools.permutations(range(k)):
        d: dict[tuple[int, int], int] = {}
        for a in range(k):
            var = (rows[a], cols[p[a]])
            d[var] = d.get(var, 0) + 1
        key = tuple(sorted(d.items()))
        out[key] = out.get(key, 0) + _perm_sign(p)
    return Polynomial(out)


def det_monomial(B: Bitableau, n: int, m: int) -> Polynomial:
    """Product over columns of the minors selected by the bitableau.

    Column ``c`` of the left tableau picks the rows of ``X``, the same column
    of the right tableau picks its columns (order matters: it fixes the sign).
    """
    for x in (x for r in B.left.rows for x in r):
        if not 1 <= x <= n:
            raise ValueError(f"left entry {x} outside 1..{n}")
    for x in (x for r in B.right.rows for x in r):
        if not 1 <= x <= m:
            raise ValueError(f"right entry {x} outside 1..{m}")
    out = Polynomial.const(1)
    for lc, rc in zip(B.left.columns, B.right.columns):
        out = out * _minor(lc, rc)
    return out


def _mono_weight(k: Monomial) -> Fraction:
    total = sum(e for _, e in k)
    return Fraction(math.prod(math.factorial(e) for _, e in k), math.factorial(total))


def scalar_product(f: Polynomial, g: Polynomial) -> Fraction:
    """Monomials are orthogonal and ``<x^a, x^a> = a! / |a|!``."""
    if len(f.terms) > len(g.terms):
        f, g = g, f
    return sum((v * g.terms[k] * _mono_weight(k) for k, v in f.terms.items() if k in g.terms), Fraction(0))


def shape_in_ideal(sigma, mu) -> bool:
    """Whether a determinantal monomial of shape ``sigma`` lies in ``I^(mu)``."""
    sigma, mu = _as_partition(sigma), _as_partition(mu)
    depth = max(sigma.depth, mu.depth, 1)
    return all(kappa_t(sigma, t) >= kappa_t(mu, t) for t in range(1, depth + 1))


def standard_bitableaux(degree: int, n: int, m: int) -> list[Bitableau]:
    out = []
    for shape in partitions_of(degree):
        col = shape.depth
        if col > n or col > m:
            continue
        lefts = standard_tableaux(shape, n)
        rights = standard_tableaux(shape, m)
        out.extend(Bitableau(a, b) for a in lefts for b in rights)
    return out


def standard_monomials_independent(degree: int, n: int, m: int, *, max_degree: int = MAX_DEGREE,
                                   max_dim: int = MAX_DIM) -> bool:
    """Exact linear independence of all standard monomials of one degree."""
    if degree > max_degree or n > max_dim or m > max_dim:
        raise SizeGuardExceeded(f"degree {degree}, n={n}, m={m} exceeds guard ({max_degree}, {max_dim})")
    polys = [det_monomial(B, n, m) for B in standard_bitableaux(degree, n, m)]
    basis = sorted({k for p in polys for k in p.terms})
    index = {k: i for i, k in enumerate(basis)}
    rows = []
    for p in polys:
        row = [0] * len(basis)
        for k, v in p.terms.items():
            row[index[k]] = int(v)  # expansions have integer coefficients
        rows.append(row)
    if not rows:
        return True
    # full rank mod p certifies full rank over Q; otherwise decide exactly
    if rank_mod_p(rows) == len(rows):
        return True
    return int_rank(rows) == len(rows)


def monomial_space_dim(degree: int, n: int, m: int) -> int:
    return math.comb(n * m + degree - 1, degree)
