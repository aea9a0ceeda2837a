"""Exact rational matrices and the elimination routines built on them.

A :class:`RatMatrix` is stored as an integer numerator array (numpy object
dtype, so entries are Python ints of unbounded size) over one common positive
denominator.  Everything here is exact; floats are rejected on input.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LinAlgError",
    "NotPositiveDefinite",
    "RankDeficient",
    "InconsistentSystem",
    "RatMatrix",
    "as_fraction",
    "rank",
    "det",
    "solve",
    "inverse",
    "ldl",
    "hnf",
    "int_kernel",
    "saturate",
    "rref",
    "projector",
    "lll_gram",
    "int_rank",
    "rank_mod_p",
]

_PRIME = 2_147_483_647


class LinAlgError(ValueError):
    pass


class NotPositiveDefinite(LinAlgError):
    pass


class RankDeficient(LinAlgError):
    pass


class InconsistentSystem(LinAlgError):
    pass


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings.  Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} {x!r} as an exact rational")


def _obj_array(rows) -> np.ndarray:
    arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            arr[i, j] = int(x)
    return arr


class RatMatrix:
    """Immutable exact rational matrix ``num / den``."""

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: int = 1):
        num = np.asarray(num, dtype=object)
        if num.ndim != 2:
            raise ValueError("RatMatrix needs a 2-d numerator array")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        if num.size:
            g = math.gcd(den, *(int(x) for x in num.flat))
        else:
            g = den
        if g > 1:
            num = num // g
            den //= g
        num.flags.writeable = False
        self.num = num
        self.den = den

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        fr = [[as_fraction(x) for x in row] for row in rows]
        if fr and any(len(r) != len(fr[0]) for r in fr):
            raise ValueError("ragged rows")
        den = math.lcm(1, *(x.denominator for row in fr for x in row))
        return cls(_obj_array([[x.numerator * (den // x.denominator) for x in row] for row in fr]), den)

    @classmethod
    def from_int_array(cls, arr, den: int = 1) -> "RatMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            out[idx] = int(x)
        return cls(out, den)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(_obj_array([[int(i == j) for j in range(n)] for i in range(n)]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(_obj_array([[0] * cols for _ in range(rows)]))

    @classmethod
    def diag(cls, entries: Iterable) -> "RatMatrix":
        entries = [as_fraction(x) for x in entries]
        n = len(entries)
        return cls.from_rows([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_json(cls, rows) -> "RatMatrix":
        return cls.from_rows(rows)

    # -- views ----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    def __getitem__(self, idx) -> Fraction:
        i, j = idx
        return Fraction(int(self.num[i, j]), self.den)

    def tolist(self) -> list[list[Fraction]]:
        d = self.den
        return [[Fraction(int(x), d) for x in row] for row in self.num]

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.tolist()]

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.tolist()], dtype=float)

    def is_integral(self) -> bool:
        return self.den == 1

    def int_rows(self) -> list[list[int]]:
        if self.den != 1:
            raise ValueError("matrix is not integral")
        return [[int(x) for x in row] for row in self.num]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(self.num.T.copy(), self.den)

    def trace(self) -> Fraction:
        return Fraction(int(sum(self.num[i, i] for i in range(min(self.shape)))), self.den)

    def is_symmetric(self) -> bool:
        return self.shape[0] == self.shape[1] and bool(np.all(self.num == self.num.T))

    # -- arithmetic -----------------------------------------------------
    def _aligned(self, other: "RatMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        den = math.lcm(self.den, other.den)
        return self.num * (den // self.den), other.num * (den // other.den), den

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        a, b, den = self._aligned(other)
        return RatMatrix(a + b, den)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        a, b, den = self._aligned(other)
        return RatMatrix(a - b, den)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(-self.num, self.den)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return RatMatrix(self.num.dot(other.num), self.den * other.den)

    def scale(self, c) -> "RatMatrix":
        c = as_fraction(c)
        return RatMatrix(self.num * c.numerator, self.den * c.denominator)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.den == other.den and bool(np.all(self.num == other.num))

    def __hash__(self) -> int:
        return hash((self.shape, self.den, tuple(int(x) for x in self.num.flat)))

    def __repr__(self) -> str:
        return f"RatMatrix({self.to_json()})"


def _rows_of(M) -> list[list[Fraction]]:
    if isinstance(M, RatMatrix):
        return M.tolist()
    return [[as_fraction(x) for x in row] for row in M]


def _int_rows_scaled(M) -> list[list[int]]:
    """Integer rows proportional to ``M`` (denominators cleared)."""
    if isinstance(M, RatMatrix):
        return [[int(x) for x in row] for row in M.num]
    rows = _rows_of(M)
    den = math.lcm(1, *(x.denominator for row in rows for x in row))
    return [[int(x * den) for x in row] for row in rows]


# -- fraction-free elimination -------------------------------------------
def _bareiss(a: list[list[int]]) -> tuple[int, int, list[int]]:
    """In-place fraction-free elimination.  Returns (rank, sign, pivot cols).

    After the call the last pivot entry equals the determinant of the pivot
    minor (times ``sign``); divisions are exact by Sylvester's identity.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    r, prev, sign = 0, 1, 1
    pivots = []
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            sign = -sign
        pr = a[r]
        pv = pr[c]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            a[i] = [(pv * row[j] - f * pr[j]) // prev for j in range(n)]
        prev = pv
        pivots.append(c)
        r += 1
    return r, sign, pivots


def int_rank(rows: Sequence[Sequence[int]]) -> int:
    a = [list(map(int, r)) for r in rows]
    if not a or not a[0]:
        return 0
    return _bareiss(a)[0]


def rank_mod_p(rows: Sequence[Sequence[int]], p: int = _PRIME) -> int:
    """Rank of an integer matrix over F_p (a lower bound for the rank over Q)."""
    a = np.array([[int(x) % p for x in r] for r in rows], dtype=np.int64)
    if a.size == 0:
        return 0
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        f = a[r + 1:, c].copy()
        a[r + 1:] = (a[r + 1:] - (f[:, None] * a[r]) % p) % p
        r += 1
    return r


def rank(M) -> int:
    """Exact rank."""
    return int_rank(_int_rows_scaled(M))


def det(M) -> Fraction:
    """Exact determinant of a square matrix."""
    if isinstance(M, RatMatrix):
        a, den = [[int(x) for x in row] for row in M.num], M.den
    else:
        rows = _rows_of(M)
        den = math.lcm(1, *(x.denominator for row in rows for x in row))
        a = [[int(x * den) for x in row] for row in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("det of a non-square matrix")
    if n == 0:
        return Fraction(1)
    r, sign, _ = _bareiss(a)
    if r < n:
        return Fraction(0)
    return Fraction(sign * a[n - 1][n - 1], den**n)


def rref(M) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q (zero rows dropped) and pivot columns."""
    a = _rows_of(M)
    m = len(a)
    n = len(a[0]) if m else 0
    r = 0
    pivots = []
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a[:r], pivots


def solve(M, b) -> list[Fraction]:
    """One exact solution of ``M x = b`` (free variables set to zero)."""
    rows = _rows_of(M)
    b = [as_fraction(x) for x in b]
    if len(rows) != len(b):
        raise ValueError("right-hand side length mismatch")
    n = len(rows[0]) if rows else 0
    aug = [row + [bi] for row, bi in zip(rows, b)]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == n:
        raise InconsistentSystem("system has no solution")
    x = [Fraction(0)] * n
    for row, c in zip(red, pivots):
        x[c] = row[n]
    return x


def inverse(M) -> RatMatrix:
    rows = _rows_of(M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("inverse of a non-square matrix")
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    red, pivots = rref(aug)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise RankDeficient("matrix is singular")
    return RatMatrix.from_rows([row[n:] for row in red])


def ldl(G) -> tuple[RatMatrix, RatMatrix]:
    """``G = L D L^T`` with ``L`` unit lower triangular and ``D`` positive diagonal.

    Raises :class:`NotPositiveDefinite` as soon as a pivot is not positive
    (pivot k is the ratio of consecutive leading principal minors).
    """
    g = _rows_of(G)
    n = len(g)
    if any(len(r) != n for r in g) or any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
        raise NotPositiveDefinite("Gram matrix must be square and symmetric")
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = g[j][j] - sum(L[j][k] ** 2 * D[k] for k in range(j))
        if D[j] <= 0:
            raise NotPositiveDefinite(f"leading minor {j + 1} is not positive")
        for i in range(j + 1, n):
            L[i][j] = (g[i][j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / D[j]
    return RatMatrix.from_rows(L), RatMatrix.diag(D)


# -- integer lattices -------------------------------------------------------
def _hnf_inplace(A: list[list[int]]) -> list[list[int]]:
    m = len(A)
    n = len(A[0]) if m else 0
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            pr = A[r]
            clean = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // pr[c]
                    A[i] = [x - q * y for x, y in zip(A[i], pr)]
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        pr, pv = A[r], A[r][c]
        for i in range(r):
            q = A[i][c] // pv
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], pr)]
        r += 1
    return A[:r]


def hnf(M) -> RatMatrix:
    """Row-style Hermite normal form of an integer matrix.

    Upper echelon, positive pivots, entries above each pivot reduced into
    ``[0, pivot)``; zero rows are dropped.  Two integer row sets span the same
    lattice iff their HNFs are equal.
    """
    rows = [list(map(int, r)) for r in (M.int_rows() if isinstance(M, RatMatrix) else M)]
    ncols = len(rows[0]) if rows else 0
    out = _hnf_inplace([r for r in rows if any(r)])
    if not out:
        return RatMatrix.zeros(0, ncols) if ncols else RatMatrix(np.empty((0, 0), dtype=object))
    return RatMatrix(_obj_array(out))


def int_kernel(M) -> list[list[int]]:
    """Basis (HNF rows) of ``{x in Z^n : M x = 0}`` for an integer matrix ``M``."""
    rows = [list(map(int, r)) for r in (M.int_rows() if isinstance(M, RatMatrix) else M)]
    if not rows:
        raise ValueError("empty matrix")
    m, n = len(rows), len(rows[0])
    aug = [[rows[i][j] for i in range(m)] + [int(j == k) for k in range(n)] for j in range(n)]
    red = _hnf_inplace(aug)
    return [r[m:] for r in red if not any(r[:m])]


def saturate(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """HNF basis of ``Q-span(rows) ∩ Z^n`` (the primitive closure)."""
    rows = [list(map(int, r)) for r in rows]
    n = len(rows[0])
    ker = int_kernel(rows)
    if not ker:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    sat = int_kernel(ker)
    return _hnf_inplace(sat)


def projector(B, metric=None) -> RatMatrix:
    """Orthogonal projector onto the column span of ``B``.

    With ``metric`` (a Gram matrix ``G``) the projector is taken for the inner
    product ``x^T G y``: ``B (B^T G B)^{-1} B^T G``.  It is symmetric only
    when ``G`` is the identity.
    """
    Bm = B if isinstance(B, RatMatrix) else RatMatrix.from_rows(B)
    G = RatMatrix.identity(Bm.shape[0]) if metric is None else metric
    if not isinstance(G, RatMatrix):
        G = RatMatrix.from_rows(G)
    BtG = Bm.T @ G
    gram = BtG @ Bm
    if rank(gram) < Bm.shape[1]:
        raise RankDeficient("spanning columns are not independent")
    return Bm @ inverse(gram) @ BtG


def lll_gram(G, delta: Fraction = Fraction(3, 4)) -> tuple[list[list[int]], list[list[Fraction]]]:
    """LLL reduction driven by a Gram matrix.

    Returns ``(U, H)``: the columns of the unimodular ``U`` are the reduced
    basis in old coordinates and ``H = U^T G U``.
    """
    g = _rows_of(G)
    n = len(g)
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # column j = basis vector j

    def col_axpy(k: int, l: int, q: int) -> None:
        for row in U:
            row[k] -= q * row[l]

    def col_swap(a: int, b: int) -> None:
        for row in U:
            row[a], row[b] = row[b], row[a]

    mu = [[Fraction(0)] * n for _ in range(n)]
    Bs = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (g[i][j] - sum(mu[j][l] * mu[i][l] * Bs[l] for l in range(j))) / Bs[j]
        Bs[i] = g[i][i] - sum(mu[i][l] ** 2 * Bs[l] for l in range(i))

    def red(k: int, l: int) -> None:
        if abs(mu[k][l]) > Fraction(1, 2):
            q = math.floor(mu[k][l] + Fraction(1, 2))
            col_axpy(k, l, q)
            mu[k][l] -= q
            for i in range(l):
                mu[k][i] -= q * mu[l][i]

    k = 1
    while k < n:
        red(k, k - 1)
        if Bs[k] < (delta - mu[k][k - 1] ** 2) * Bs[k - 1]:
            m_ = mu[k][k - 1]
            Bn = Bs[k] + m_**2 * Bs[k - 1]
            col_swap(k, k - 1)
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            mu[k][k - 1] = m_ * Bs[k - 1] / Bn
            Bs[k] = Bs[k - 1] * Bs[k] / Bn
            Bs[k - 1] = Bn
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m_ * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    GU = [[sum(g[a][b] * U[b][j] for b in range(n) if U[b][j]) for j in range(n)] for a in range(n)]
    H = [[sum(U[a][i] * GU[a][j] for a in range(n) if U[a][i]) for j in range(n)] for i in range(n)]
    return U, H
