"""Flags of subspaces, stored as stacks of exact projectors.

A flag of shape ``d = (d_1 > ... > d_l)`` in an ``n``-dimensional space is
kept as the projectors ``P_1, ..., P_l`` onto its members (``rank P_i = d_i``).
The projectors carry no basis choice, so two flags are equal iff their stacks
are equal entry by entry.

Flags may live in coordinates with a non-standard inner product ``x^T G y``
(lattice coordinates).  Projectors are then ``G``-self-adjoint rather than
symmetric; traces of products, and therefore every quantity the design and
extremality code needs, are unaffected by the choice of coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactlinalg import RatMatrix, inverse, projector, rank, rref

__all__ = [
    "FlagShape",
    "Flag",
    "FloatFlag",
    "FlagError",
    "flag_from_bases",
    "haar_sample",
    "haar_sample_batch",
    "trace_pair",
    "random_rational_orthogonal",
    "random_rational_flag",
    "mat_trace_product",
]


class FlagError(ValueError):
    pass


@dataclass(frozen=True)
class FlagShape:
    dims: tuple[int, ...]
    n: int

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise FlagError("a flag needs at least one subspace")
        if any(a <= b for a, b in zip(dims, dims[1:])) or dims[-1] <= 0:
            raise FlagError(f"dimensions must be strictly decreasing and positive: {dims}")
        if dims[0] >= self.n:
            raise FlagError(f"largest subspace dimension {dims[0]} must be < n = {self.n}")

    @property
    def ell(self) -> int:
        return len(self.dims)

    @property
    def m(self) -> int:
        return self.dims[0]

    def block_sizes(self) -> tuple[int, ...]:
        """``(m_1, ..., m_l, m_{l+1})``: innermost block first, complement last."""
        inner = list(reversed(self.dims)) + [self.n]
        sizes = [inner[0]] + [b - a for a, b in zip(inner, inner[1:])]
        return tuple(sizes)

    def to_json(self) -> dict:
        return {"d": list(self.dims), "n": self.n}

    @classmethod
    def from_json(cls, obj) -> "FlagShape":
        return cls(tuple(obj["d"]), int(obj["n"]))


def mat_trace_product(A: RatMatrix, B: RatMatrix) -> Fraction:
    """``trace(A B)`` without forming the product."""
    return Fraction(int((A.num * B.num.T).sum()), A.den * B.den)


@dataclass(frozen=True, eq=False)
class Flag:
    shape: FlagShape
    projectors: tuple[RatMatrix, ...]
    metric: RatMatrix | None = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "projectors", tuple(self.projectors))
        if self.check:
            self.validate()

    def validate(self) -> None:
        n = self.shape.n
        if len(self.projectors) != self.shape.ell:
            raise FlagError("one projector per flag member is required")
        G = self.metric
        for P, d in zip(self.projectors, self.shape.dims):
            if P.shape != (n, n):
                raise FlagError("projector has the wrong size")
            if P @ P != P:
                raise FlagError("projector is not idempotent")
            if P.trace() != d:
                raise FlagError(f"projector trace {P.trace()} != {d}")
            sym = P if G is None else G @ P
            if not sym.is_symmetric():
                raise FlagError("projector is not self-adjoint")
        for a in range(self.shape.ell):
            for b in range(a + 1, self.shape.ell):
                Pa, Pb = self.projectors[a], self.projectors[b]
                if Pa @ Pb != Pb:
                    raise FlagError("flag members are not nested")

    @property
    def n(self) -> int:
        return self.shape.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Flag):
            return NotImplemented
        return (self.shape == other.shape and self.projectors == other.projectors
                and self.metric == other.metric)

    def __hash__(self) -> int:
        return hash((self.shape, self.projectors))

    def transform(self, Q: RatMatrix, Qinv: RatMatrix | None = None) -> "Flag":
        """Image ``Q F``; conjugates every projector by ``Q``."""
        Qinv = inverse(Q) if Qinv is None else Qinv
        return Flag(self.shape, tuple(Q @ P @ Qinv for P in self.projectors), self.metric, check=False)

    def to_json(self) -> dict:
        out = {"shape": self.shape.to_json(), "projectors": [P.to_json() for P in self.projectors]}
        if self.metric is not None:
            out["metric"] = self.metric.to_json()
        return out

    @classmethod
    def from_json(cls, obj) -> "Flag":
        metric = RatMatrix.from_json(obj["metric"]) if obj.get("metric") is not None else None
        return cls(FlagShape.from_json(obj["shape"]), tuple(RatMatrix.from_json(p) for p in obj["projectors"]), metric)


def _basis_rows(vectors: Sequence[Sequence]) -> list[list[Fraction]]:
    red, _ = rref(vectors)
    return red


def flag_from_bases(spans: Sequence[Sequence[Sequence]], n: int | None = None, metric=None,
                    dims: Sequence[int] | None = None) -> Flag:
    """Flag from spanning sets listed from the largest subspace to the smallest."""
    if not spans:
        raise FlagError("no subspaces given")
    n = len(spans[0][0]) if n is None else n
    if metric is not None and not isinstance(metric, RatMatrix):
        metric = RatMatrix.from_rows(metric)
    bases = []
    for vecs in spans:
        if any(len(v) != n for v in vecs):
            raise FlagError("vector length does not match the ambient dimension")
        bases.append(_basis_rows(vecs))
    got = tuple(len(b) for b in bases)
    if dims is not None and tuple(dims) != got:
        raise FlagError(f"spans have dimensions {got}, expected {tuple(dims)}")
    shape = FlagShape(got, n)
    for big, small in zip(bases, bases[1:]):
        if rank(big + small) != len(big):
            raise FlagError("spans are not nested")
    projs = tuple(projector(RatMatrix.from_rows(b).T, metric) for b in bases)
    return Flag(shape, projs, metric, check=False)


@dataclass(frozen=True, eq=False)
class FloatFlag:
    shape: FlagShape
    X: np.ndarray
    tolerance: float = 1e-12

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.shape != (self.shape.n, self.shape.m):
            raise FlagError(f"X has shape {X.shape}, expected {(self.shape.n, self.shape.m)}")
        if np.abs(X.T @ X - np.eye(X.shape[1])).max() > self.tolerance:
            raise FlagError("columns of X are not orthonormal within tolerance")
        object.__setattr__(self, "X", X)

    def projector(self, iota: int) -> np.ndarray:
        d = self.shape.dims[iota - 1]
        Y = self.X[:, :d]
        return Y @ Y.T

    def to_json(self) -> dict:
        return {"shape": self.shape.to_json(), "X": self.X.tolist(), "tolerance": self.tolerance}


def _mgs(A: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt on the columns of a stack of matrices (..., n, m)."""
    Q = np.array(A, dtype=float, copy=True)
    m = Q.shape[-1]
    for j in range(m):
        Q[..., :, j] /= np.linalg.norm(Q[..., :, j], axis=-1)[..., None]
        for k in range(j + 1, m):
            r = np.sum(Q[..., :, j] * Q[..., :, k], axis=-1)
            Q[..., :, k] -= r[..., None] * Q[..., :, j]
    return Q


def haar_sample_batch(shape: FlagShape, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-distributed flags as an array of orthonormal frames (count, n, m)."""
    G = rng.standard_normal((count, shape.n, shape.m))
    return _mgs(G)


def haar_sample(shape: FlagShape, seed: int | np.random.Generator = 0) -> FloatFlag:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return FloatFlag(shape, haar_sample_batch(shape, 1, rng)[0])


def trace_pair(F, G, iota: int, iota2: int):
    """``trace(P_iota(F) P_iota2(G))``; exact for :class:`Flag`, float otherwise.

    Indices are 1-based positions in the flags' dimension lists.
    """
    if F.shape.n != G.shape.n:
        raise FlagError("flags live in different ambient spaces")
    if isinstance(F, Flag) and isinstance(G, Flag):
        if (F.metric is None) != (G.metric is None) or (F.metric is not None and F.metric != G.metric):
            raise FlagError("flags use different inner products")
        return mat_trace_product(F.projectors[iota - 1], G.projectors[iota2 - 1])
    A = F.projector(iota) if isinstance(F, FloatFlag) else F.projectors[iota - 1].to_float()
    B = G.projector(iota2) if isinstance(G, FloatFlag) else G.projectors[iota2 - 1].to_float()
    return float(np.sum(A * B.T))


def random_rational_orthogonal(n: int, rng: np.random.Generator, reflections: int | None = None,
                               spread: int = 3) -> RatMatrix:
    """Product of rational Householder reflections ``I - 2 v v^T / v^T v``."""
    Q = RatMatrix.identity(n)
    I = RatMatrix.identity(n)
    for _ in range(n if reflections is None else reflections):
        v = [0] * n
        while not any(v):
            v = [int(x) for x in rng.integers(-spread, spread + 1, size=n)]
        V = RatMatrix.from_rows([[a * b for b in v] for a in v])
        H = I - V.scale(Fraction(2, sum(a * a for a in v)))
        Q = H @ Q
    return Q


def random_rational_flag(shape: FlagShape, rng: np.random.Generator, spread: int = 3, metric=None) -> Flag:
    """Nested spans of the first ``d_i`` of ``d_1`` random integer vectors."""
    n = shape.n
    while True:
        vecs = [[int(x) for x in rng.integers(-spread, spread + 1, size=n)] for _ in range(shape.m)]
        if rank(vecs) == shape.m:
            break
    return flag_from_bases([vecs[:d] for d in shape.dims], n, metric=metric)
