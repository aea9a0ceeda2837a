"""Invariant vectors of the stabilizer and the degree-2 zonal kernel.

Columns ``1..m`` of a flag frame split into blocks.  Block ``1`` holds the
columns ``1..d_l`` (the smallest subspace), block ``i`` the columns
``d_{l+2-i}+1 .. d_{l+1-i}``.  The invariant vectors in degree 2 are the block
sums of ``e_v (x) e_v``; degree-4 spaces are kept only for dimension counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import Partition, _as_partition
from .flags import FlagShape, FloatFlag, trace_pair

__all__ = ["InvariantVector", "n_mu_dim", "upsilon", "invariant_basis", "zonal2", "zonal2_full", "zonal_sum",
           "zonal_vanishes"]

_EVEN = {(2,), (4,), (2, 2)}


def n_mu_dim(mu, shape: FlagShape) -> int:
    """Dimension of the stabilizer-invariant subspace attached to ``mu``."""
    mu = _as_partition(mu)
    if mu.degree > 4:
        raise ValueError(f"only partitions of degree <= 4 are supported, got {mu}")
    ell = shape.ell
    if mu.degree == 0:
        return 1
    if mu.parts == (2,) or mu.parts == (2, 2):
        return ell
    if mu.parts == (4,):
        return ell * (ell + 1) // 2
    return 0


@dataclass(frozen=True)
class InvariantVector:
    """Coefficients over the block spanning vectors.

    For ``(2)`` and ``(2,2)`` the index is a block ``i``; for ``(4)`` it is a
    pair ``(i, j)`` with ``i <= j``.
    """

    mu: Partition
    shape: FlagShape
    coefficients: tuple

    def __post_init__(self):
        mu = _as_partition(self.mu)
        if mu.parts not in _EVEN:
            raise ValueError(f"no invariant vectors for {mu}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))
        if len(self.coefficients) != n_mu_dim(mu, self.shape):
            raise ValueError("coefficient count does not match the invariant dimension")

    def __add__(self, other: "InvariantVector") -> "InvariantVector":
        if (self.mu, self.shape) != (other.mu, other.shape):
            raise ValueError("incompatible invariant vectors")
        return InvariantVector(self.mu, self.shape, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def diagonal(self) -> tuple[Fraction, ...]:
        """For ``mu = (2)``: coefficient of ``e_v (x) e_v`` for ``v = 1..m``."""
        if self.mu.parts != (2,):
            raise ValueError("diagonal form exists only for mu = (2)")
        out = []
        for i, size in enumerate(self.shape.block_sizes()[:-1]):
            out.extend([self.coefficients[i]] * size)
        return tuple(out)

    def to_json(self) -> dict:
        return {"mu": self.mu.to_json(), "coefficients": [str(c) for c in self.coefficients]}


def invariant_basis(mu, shape: FlagShape) -> list[InvariantVector]:
    mu = _as_partition(mu)
    k = n_mu_dim(mu, shape)
    return [InvariantVector(mu, shape, tuple(int(i == j) for j in range(k))) for i in range(k)]


def upsilon(shape: FlagShape, iota: int) -> InvariantVector:
    """Sum of ``e_v (x) e_v`` over ``v <= d_iota``."""
    ell = shape.ell
    if not 1 <= iota <= ell:
        raise IndexError(f"iota must lie in 1..{ell}")
    # d_iota covers blocks 1 .. ell+1-iota
    return InvariantVector(Partition((2,)), shape, tuple(int(i < ell + 1 - iota) for i in range(ell)))


def zonal2(F, G, iota: int, iota2: int):
    """``trace(P_iota(F) P_iota2(G)) - d_iota d_iota2 / n``."""
    d, d2, n = F.shape.dims[iota - 1], G.shape.dims[iota2 - 1], F.shape.n
    tp = trace_pair(F, G, iota, iota2)
    if isinstance(tp, Fraction):
        return tp - Fraction(d * d2, n)
    return tp - d * d2 / n


def zonal2_full(j: int, j2: int, XF: FloatFlag, XG: FloatFlag) -> float:
    """Single-column kernel evaluated from frame entries (1-based columns).

    Uses the expansion in squared-coordinate differences against the first
    coordinate plus the off-diagonal cross terms.
    """
    x = np.asarray(XF.X if isinstance(XF, FloatFlag) else XF, dtype=float)[:, j - 1]
    y = np.asarray(XG.X if isinstance(XG, FloatFlag) else XG, dtype=float)[:, j2 - 1]
    n = x.shape[0]
    a = x[1:] ** 2 - x[0] ** 2
    b = y[1:] ** 2 - y[0] ** 2
    diag = float(a @ b) - float(a.sum() * b.sum()) / n
    cross = float((x @ y) ** 2 - np.sum(x * x * y * y))
    return diag + cross


def zonal_sum(D, probe, iota: int, iota2: int) -> Fraction:
    """Weighted sum of ``zonal2(F, probe)`` over a flag set (exact).

    ``D`` is a :class:`~vexillar.design.FlagSet` or a plain list of flags.
    """
    flags = D.flags() if hasattr(D, "flags") else list(D)
    weights = getattr(D, "weights", None) or [Fraction(1, len(flags))] * len(flags)
    return sum((Fraction(w) * zonal2(F, probe, iota, iota2) for F, w in zip(flags, weights)), Fraction(0))


def zonal_vanishes(D, probes, degree: int = 2) -> bool:
    """Degree-2 zonal criterion: every block pair sums to zero against every probe.

    Only ``degree == 2`` is implemented; the probes should span the symmetric
    matrices (generic flags, at least ``n(n+1)/2`` of them, do).
    """
    if degree != 2:
        raise NotImplementedError("zonal sums are implemented in degree 2 only")
    flags = D.flags() if hasattr(D, "flags") else list(D)
    ell = flags[0].shape.ell
    return all(zonal_sum(D, P, i, j) == 0
               for P in probes for i in range(1, ell + 1) for j in range(1, P.shape.ell + 1))
