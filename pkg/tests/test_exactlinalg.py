import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vexillar.exactlinalg import (InconsistentSystem, NotPositiveDefinite, RankDeficient, RatMatrix, det, hnf,
                                  int_kernel, int_rank, inverse, ldl, lll_gram, projector, rank, rank_mod_p, rref,
                                  saturate, solve)

F = Fraction
small_ints = st.integers(-6, 6)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def random_unimodular(n, rng, steps=12):
    U = np.eye(n, dtype=object)
    for _ in range(steps):
        i, j = rng.choice(n, 2, replace=False)
        U[i] += int(rng.integers(-2, 3)) * U[j]
        if rng.random() < 0.3:
            U[[i, j]] = U[[j, i]]
    return U


def test_projector_examples():
    assert projector([[1], [0]]) == RatMatrix.from_rows([[1, 0], [0, 0]])
    assert projector([[1], [1]]) == RatMatrix.from_rows([[F(1, 2)] * 2] * 2)
    assert projector(RatMatrix.identity(3)) == RatMatrix.identity(3)
    with pytest.raises(RankDeficient):
        projector([[1, 2], [2, 4]])


def test_projector_with_metric_is_self_adjoint():
    G = RatMatrix.from_rows([[2, -1], [-1, 2]])
    P = projector([[1], [0]], G)
    assert P @ P == P
    assert G @ P == (G @ P).T
    assert not P.is_symmetric()


def in_lattice(v, rows):
    sol = solve(RatMatrix.from_rows(rows).T, v)
    return all(x.denominator == 1 for x in sol)


def test_hnf_examples():
    a = hnf([[2, 0], [0, 2]])
    b = hnf([[2, 2], [0, 2]])
    assert a == b == RatMatrix.from_rows([[2, 0], [0, 2]])
    # brute-force membership both ways
    for v in ([2, 0], [0, 2]):
        assert in_lattice(v, [[2, 2], [0, 2]])
    for v in ([2, 2], [0, 2]):
        assert in_lattice(v, [[2, 0], [0, 2]])
    assert hnf(np.eye(3, dtype=int).tolist()) == RatMatrix.identity(3)
    assert hnf([[1, 1]]) == RatMatrix.from_rows([[1, 1]])


def test_ldl_examples():
    L, D = ldl([[2, 0], [0, 2]])
    assert L == RatMatrix.identity(2) and D == RatMatrix.diag([2, 2])
    G = RatMatrix.from_rows([[2, 1], [1, 2]])
    L, D = ldl(G)
    assert L == RatMatrix.from_rows([[1, 0], [F(1, 2), 1]])
    assert D == RatMatrix.diag([2, F(3, 2)])
    assert L @ D @ L.T == G
    with pytest.raises(NotPositiveDefinite):
        ldl([[1, 2], [2, 1]])


def test_solve_and_inverse():
    M = RatMatrix.from_rows([[2, 1], [1, 3]])
    assert solve(M, [3, 4]) == [1, 1]
    assert M @ inverse(M) == RatMatrix.identity(2)
    with pytest.raises(RankDeficient):
        inverse(RatMatrix.from_rows([[1, 2], [2, 4]]))
    with pytest.raises(InconsistentSystem):
        solve(RatMatrix.from_rows([[1, 2], [2, 4]]), [1, 3])


def test_det_against_permutation_expansion():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        A = rng.integers(-5, 6, (n, n)).tolist()
        brute = 0
        for perm in itertools.permutations(range(n)):
            sign = (-1) ** sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
            term = sign
            for i in range(n):
                term *= A[i][perm[i]]
            brute += term
        assert det(A) == brute


@given(int_matrix(3, 4))
def test_rank_agrees_across_methods(rows):
    r = rank(rows)
    assert int_rank(rows) == r
    assert rank_mod_p(rows) <= r
    red, piv = rref(rows)
    assert len(piv) == r


@given(int_matrix(3, 3), st.integers(0, 2**32))
def test_hnf_canonical_under_unimodular_change(rows, seed):
    rng = np.random.default_rng(seed)
    U = random_unimodular(3, rng)
    changed = (U @ np.array(rows, dtype=object)).tolist()
    assert hnf(rows) == hnf(changed)


@given(int_matrix(2, 4))
def test_int_kernel_is_kernel(rows):
    K = int_kernel(rows)
    M = np.array(rows, dtype=object)
    for k in K:
        assert not any(M @ np.array(k, dtype=object))
    assert len(K) == 4 - rank(rows)


def test_saturate():
    assert saturate([[2, 4, 0]]) == [[1, 2, 0]]
    assert saturate([[2, 0], [0, 2]]) == [[1, 0], [0, 1]]


@given(int_matrix(3, 3))
def test_lll_gram_is_unimodular_change(rows):
    B = np.array(rows, dtype=object)
    if rank(rows) < 3:
        return
    G = (B @ B.T).tolist()
    U, H = lll_gram(G, Fraction(99, 100))
    assert abs(det(U)) == 1
    Uo = np.array(U, dtype=object)
    assert (Uo.T @ np.array(G, dtype=object) @ Uo).tolist() == H


def test_ratmatrix_roundtrip_and_arith():
    M = RatMatrix.from_rows([[F(1, 2), 2], [F(-3, 4), 0]])
    assert RatMatrix.from_json(M.to_json()) == M
    assert (M + M) == M.scale(2)
    assert (M - M) == RatMatrix.zeros(2, 2)
    assert M.trace() == F(1, 2)
    assert hash(M) == hash(RatMatrix.from_rows(M.tolist()))
