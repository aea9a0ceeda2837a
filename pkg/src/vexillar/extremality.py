"""Projector sums of minimal flags and the extremality certificates built on them.

The pairing between endomorphisms is the trace form ``tr(A B)`` (projectors
are self-adjoint, so this is the Frobenius pairing in any coordinates).  In
lattice coordinates a self-adjoint ``A`` is encoded by the upper triangle of
the symmetric matrix ``G A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .design import DesignCertificate, FlagSet, is_design
from .exactlinalg import RatMatrix, int_rank, rank_mod_p
from .flags import mat_trace_product
from .lattice import DEFAULT_NODE_BUDGET, Lattice, LatticeFlag, MinimalFlags, Weight, minimal_flags
from .parallel import exact_AtB
from .simplex import maximize

__all__ = [
    "ProjSum",
    "ExtremalityReport",
    "proj_sum",
    "is_perfect",
    "is_strongly_eutactic",
    "is_eutactic",
    "c_matrix",
    "CMatrixSummary",
    "certify_extreme",
    "DEFAULT_C_MATRIX_CAP",
]

DEFAULT_C_MATRIX_CAP = 50_000
DEFAULT_LP_CAP = 2_000


@dataclass(frozen=True, eq=False)
class ProjSum:
    matrix: RatMatrix
    metric: RatMatrix | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> Fraction:
        return self.matrix.trace()

    def symmetric_form(self) -> RatMatrix:
        return self.matrix if self.metric is None else self.metric @ self.matrix


def proj_sum(chain: LatticeFlag) -> ProjSum:
    """Sum of the projectors onto the chain members, repeated ranks counted."""
    F = chain.flag()
    mult = [c for _, c in chain.weight.rank_multiplicities()]
    total = None
    for P, c in zip(F.projectors, mult):
        term = P.scale(c)
        total = term if total is None else total + term
    return ProjSum(total, chain.lattice.gram)


def _upper_rows(S: Sequence[ProjSum]) -> tuple[np.ndarray, int]:
    """Integer rows (one per sum) of the upper triangles of ``G Pi`` over one denominator."""
    mats = [p.symmetric_form() for p in S]
    den = math.lcm(*(M.den for M in mats))
    n = mats[0].shape[0]
    iu = np.triu_indices(n)
    rows = np.array([(M.num * (den // M.den))[iu] for M in mats], dtype=object)
    return rows, den


def _exact_rank(rows: np.ndarray) -> int:
    """Rank over Q; mod-p full rank certifies, otherwise rank(A^T A) is exact."""
    ncols = rows.shape[1]
    rp = rank_mod_p(rows.tolist())
    if rp == min(rows.shape):
        return rp
    gram = exact_AtB(rows, rows)
    return int_rank(gram.tolist()) if ncols else 0


def is_perfect(S: Sequence[ProjSum], n: int | None = None) -> tuple[bool, int]:
    if not S:
        raise ValueError("empty set")
    n = S[0].n if n is None else n
    rows, _ = _upper_rows(S)
    r = _exact_rank(rows)
    return r == n * (n + 1) // 2, r


def _total(S: Sequence[ProjSum]) -> RatMatrix:
    total = S[0].matrix
    for p in S[1:]:
        total = total + p.matrix
    return total


def is_strongly_eutactic(S: Sequence[ProjSum], size: int, s: int | None = None, n: int | None = None) -> bool:
    """``sum Pi = (|lambda| s / n) I`` exactly."""
    n = S[0].n if n is None else n
    s = len(S) if s is None else s
    return _total(S) == RatMatrix.identity(n).scale(Fraction(size * s, n))


def is_eutactic(S: Sequence[ProjSum], n: int | None = None) -> tuple[bool, list[Fraction] | None]:
    """Exact LP: maximize ``eps`` with ``sum (eps + u_k) Pi_k = I``, ``u >= 0``."""
    n = S[0].n if n is None else n
    rows, den = _upper_rows(S)
    G = S[0].metric
    target = (RatMatrix.identity(n) if G is None else G)
    iu = np.triu_indices(n)
    b = [Fraction(int(x), target.den) for x in target.num[iu]]
    cols = [[Fraction(int(x), den) for x in r] for r in rows]
    m = len(b)
    s = len(cols)
    sumcol = [sum((c[i] for c in cols), Fraction(0)) for i in range(m)]
    # variables: eps+, eps-, u_1..u_s
    A = [[sumcol[i], -sumcol[i]] + [c[i] for c in cols] for i in range(m)]
    res = maximize([1, -1] + [0] * s, A, b)
    if res.status != "optimal":
        return False, None
    eps = res.x[0] - res.x[1]
    if eps <= 0:
        return False, None
    return True, [eps + u for u in res.x[2:]]


@dataclass
class CMatrixSummary:
    s: int
    omega1: Fraction
    omega: Fraction
    multiplicity: int
    rank: int
    kappa: int
    N: int
    row_sums_ok: bool
    quadratic_ok: bool
    trace_ok: bool
    commutes_with_J: bool

    @property
    def ok(self) -> bool:
        return self.row_sums_ok and self.quadratic_ok and self.trace_ok and self.commutes_with_J

    def to_json(self) -> dict:
        return {"s": self.s, "omega1": str(self.omega1), "omega": str(self.omega),
                "omega_multiplicity": self.multiplicity, "rank": self.rank, "kappa": self.kappa, "N": self.N,
                "row_sums_ok": self.row_sums_ok, "quadratic_relation_ok": self.quadratic_ok,
                "trace_ok": self.trace_ok, "commutes_with_J": self.commutes_with_J, "exactness": "exact"}


def kappa_total(ranks: Sequence[int], n: int) -> int:
    return sum(n * min(a, b) - a * b for a in ranks for b in ranks)


def c_matrix(S: Sequence[ProjSum], weight: Weight, n: int | None = None,
             require_design: FlagSet | None = None) -> tuple[np.ndarray, int, CMatrixSummary]:
    """Pairing matrix of the projector sums and its exact spectral checks.

    Returns ``(C numerators, denominator, summary)``.  When ``require_design``
    is given it must pass the degree-4 test first.
    """
    if require_design is not None and not is_design(require_design, 4).passed:
        raise ValueError("minimal flags are not a 4-design")
    n = S[0].n if n is None else n
    s = len(S)
    mats = [p.matrix for p in S]
    den = math.lcm(*(M.den for M in mats))
    A = np.array([(M.num * (den // M.den)).ravel() for M in mats], dtype=object)
    At = np.array([(M.num * (den // M.den)).T.ravel() for M in mats], dtype=object)
    C = exact_AtB(A.T, At.T)  # tr(Pi_a Pi_b) * den^2
    d2 = den * den
    size = weight.size
    ranks = weight.ranks
    kap = kappa_total(ranks, n)
    N = n * (n + 1) // 2 - 1
    omega1 = Fraction(size * size * s, n)
    row_ok = all(Fraction(int(x), d2) == omega1 for x in C.sum(axis=1))
    tr_expected = s * sum((2 * i + 1) * r for i, r in enumerate(ranks))
    trace_ok = Fraction(int(np.trace(C)), d2) == tr_expected
    alpha = Fraction(s * kap, n * N)
    beta = Fraction(s * size * size, n * n) * (size * size - Fraction(kap, N))
    C2 = exact_AtB(C, C)  # C symmetric, so C^T C = C^2; scale d2^2
    lhs_scale = d2 * d2
    # C^2 == alpha C + beta J  <=>  C2 == alpha*d2*C + beta*d2^2
    quad_ok = True
    ad, bd = alpha * d2, beta * lhs_scale
    for i in range(s):
        for j in range(s):
            if C2[i, j] != ad * C[i, j] + bd:
                quad_ok = False
                break
        if not quad_ok:
            break
    rows_J = C.sum(axis=1)
    cols_J = C.sum(axis=0)
    commutes = all(rows_J[i] == cols_J[j] for i in range(s) for j in range(s)) if s < 2000 else \
        (len(set(rows_J.tolist())) == 1 and list(rows_J) == list(cols_J))
    rank = _exact_rank(C)
    mult = rank - 1 if omega1 != alpha else rank
    summ = CMatrixSummary(s, omega1, alpha, mult, rank, kap, N, row_ok, quad_ok, trace_ok, commutes)
    return C, d2, summ


@dataclass
class ExtremalityReport:
    lattice: str
    weight: list[int]
    n: int
    s: int
    gamma: tuple[Fraction, Fraction, Fraction]
    gamma_float: float
    design: DesignCertificate
    strongly_eutactic: bool
    eutactic: bool | None
    eutaxy_coefficients: list[Fraction] | None
    perfect: bool
    perfection_rank: int
    c_matrix: CMatrixSummary | None
    verdict: str
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        p, d, e = self.gamma
        out = {
            "lattice": self.lattice,
            "lambda": self.weight,
            "n": self.n,
            "s_lambda": {"value": self.s, "exactness": "exact"},
            "gamma": {"prod_det": str(p), "det_lattice": str(d), "exponent": str(e), "exactness": "exact"},
            "gamma_float": {"value": self.gamma_float, "exactness": "float-diagnostic"},
            "design": self.design.to_json(),
            "strongly_eutactic": self.strongly_eutactic,
            "eutactic": self.eutactic,
            "perfect": self.perfect,
            "perfection_rank": self.perfection_rank,
            "verdict": self.verdict,
            "notes": self.notes,
        }
        if self.eutaxy_coefficients is not None:
            coeffs = self.eutaxy_coefficients
            if len(set(coeffs)) == 1:
                out["eutaxy_coefficients"] = {"all_equal": str(coeffs[0]), "count": len(coeffs), "exactness": "exact"}
            else:
                out["eutaxy_coefficients"] = {"values": [str(c) for c in coeffs], "exactness": "exact"}
        out["c_matrix"] = self.c_matrix.to_json() if self.c_matrix is not None else None
        return out


def certify_extreme(L: Lattice, weight, workers: int = 1, c_matrix_cap: int = DEFAULT_C_MATRIX_CAP,
                    lp_cap: int = DEFAULT_LP_CAP, result: MinimalFlags | None = None,
                    node_budget: int = DEFAULT_NODE_BUDGET) -> ExtremalityReport:
    """Minimal flags, then the 4-design test, eutaxy and perfection."""
    W = weight if isinstance(weight, Weight) else Weight(weight)
    M = minimal_flags(L, W, workers, node_budget) if result is None else result
    n = L.n
    notes = ["s_lambda counts sublattice chains; +-related vectors give one chain"]
    flags = [f.flag() for f in M.flags]
    D = FlagSet.from_flags(flags)
    cert = is_design(D, 4, workers)
    sums = [proj_sum(f) for f in M.flags]
    strong = is_strongly_eutactic(sums, W.size, M.s, n)
    perfect, prank = is_perfect(sums, n)
    eut, coeffs = None, None
    if strong:
        eut, coeffs = True, [Fraction(n, W.size * M.s)] * M.s
    elif M.s <= lp_cap:
        eut, coeffs = is_eutactic(sums, n)
    else:
        notes.append(f"eutaxy LP skipped: s_lambda = {M.s} exceeds cap {lp_cap}")
    cm = None
    if cert.passed and M.s <= c_matrix_cap:
        _, _, cm = c_matrix(sums, W, n)
    elif cert.passed:
        notes.append(f"C-matrix checks skipped: s_lambda = {M.s} exceeds cap {c_matrix_cap}")
    if cert.passed:
        verdict = "extreme (certified via strong perfection)"
    elif perfect and eut:
        verdict = "extreme (certified via perfection and eutaxy)"
    else:
        verdict = "undetermined by this method"
    return ExtremalityReport(L.name, list(W.lam.parts), n, M.s, M.gamma, M.gamma_float(), cert, strong, eut,
                             coeffs, perfect, prank, cm, verdict, notes)
