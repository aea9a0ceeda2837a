import itertools
from fractions import Fraction

import numpy as np
import pytest

from vexillar.catalog import d4_automorphism_generators
from vexillar.design import is_design
from vexillar.exactlinalg import RatMatrix
from vexillar.flags import FlagShape, flag_from_bases, random_rational_flag
from vexillar.groups import (ClassData, GroupError, GroupOverflow, class_data, close, invariant_report, orbit,
                             orbit_design_strength, power_traces, reference_invariant_dim,
                             signed_permutation_class_data, signed_permutation_generators, sym_sym_invariant_dim)


def h_k(values, k):
    """Complete homogeneous symmetric polynomial by brute-force multisets."""
    return sum(np.prod([values[i] for i in c]) for c in itertools.combinations_with_replacement(range(len(values)), k))


def sym2_action(g):
    n = g.shape[0]
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    basis = []
    for i, j in idx:
        E = np.zeros((n, n))
        E[i, j] = E[j, i] = 1
        basis.append(E)
    cols = []
    for E in basis:
        Y = g @ E @ g.T
        cols.append([Y[i, j] for i, j in idx])
    return np.array(cols).T


def brute_invariant_dim(G, k):
    """Average of the trace of g on Sym^k(Sym^2), from eigenvalues of each element."""
    total = 0
    for g in G.elements:
        ev = np.linalg.eigvals(sym2_action(g.to_float()))
        total += h_k(ev, k)
    return int(round((total / G.order).real))


def test_small_closures():
    assert close([RatMatrix.identity(2).scale(-1)]).order == 2
    G = close(signed_permutation_generators(2))
    assert G.order == 8
    assert close(signed_permutation_generators(3)).order == 48


def test_overflow_and_bad_generators():
    with pytest.raises(GroupOverflow):
        close(signed_permutation_generators(4), max_order=100)
    with pytest.raises(GroupError):
        close([RatMatrix.from_rows([[1, 1], [0, 1]])])
    with pytest.raises(GroupError):
        close([])


def test_aut_d4_order_against_root_tuple_count():
    assert close(d4_automorphism_generators()).order == 1152
    roots = [v for v in itertools.product((-1, 0, 1), repeat=4) if sum(x * x for x in v) == 2]
    assert len(roots) == 24
    cartan = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
    dot = lambda a, b: sum(x * y for x, y in zip(a, b))  # noqa: E731
    count = 0

    def extend(chosen):
        nonlocal count
        k = len(chosen)
        if k == 4:
            count += 1
            return
        for r in roots:
            if all(dot(r, chosen[i]) == cartan[k][i] for i in range(k)):
                extend(chosen + [r])

    extend([])
    assert count == 1152


def test_orbit_examples():
    G = close(signed_permutation_generators(2))
    line = flag_from_bases([[[1, 0]]])
    D = orbit(line, G)
    assert len(D) == 2
    assert orbit(line, close([RatMatrix.identity(2)])).flags() == [line]


def test_invariant_dim_examples():
    triv = close([RatMatrix.identity(3)])
    pm = close([RatMatrix.identity(3).scale(-1)])
    b3 = close(signed_permutation_generators(3))
    assert sym_sym_invariant_dim(triv, 1) == 6
    for k in (1, 2, 3):
        assert sym_sym_invariant_dim(pm, k) == sym_sym_invariant_dim(triv, k)
    assert sym_sym_invariant_dim(b3, 1) == 1
    assert [sym_sym_invariant_dim(b3, k) for k in (1, 2, 3)] == [brute_invariant_dim(b3, k) for k in (1, 2, 3)]
    assert [reference_invariant_dim(3, k) for k in (1, 2, 3)] == [1, 2, 3]
    assert orbit_design_strength(b3, 2) and not orbit_design_strength(b3, 4)
    assert not orbit_design_strength(triv, 2)
    with pytest.raises(GroupError):
        orbit_design_strength(b3, 3)


def test_aut_d4_invariants():
    G = close(d4_automorphism_generators())
    assert orbit_design_strength(G, 2)
    rep = invariant_report(G, 4)
    assert [r["invariant_dim"] for r in rep["degrees"]] == [1, 2]
    assert brute_invariant_dim(G, 2) == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_class_formula_against_element_sums(n):
    G = close(signed_permutation_generators(n))
    formula = signed_permutation_class_data(n)
    enumerated = class_data(G)
    assert formula.order == enumerated.order == G.order
    merged = {}
    for s, t in formula.classes:
        merged[t] = merged.get(t, 0) + s
    assert merged == {t: s for s, t in enumerated.classes}
    for k in (1, 2, 3):
        assert sym_sym_invariant_dim(formula, k) == sym_sym_invariant_dim(G, k)


def test_class_data_json_and_validation():
    cd = signed_permutation_class_data(3)
    assert ClassData.from_json(cd.to_json()) == cd
    with pytest.raises(GroupError):
        ClassData(2, 5, ((1, (Fraction(2),)),))
    assert power_traces(RatMatrix.diag([-1, 1]), 3) == (0, 2, 0)


def test_orbit_matches_invariant_criterion(rng):
    G = close(d4_automorphism_generators())
    for dims in [(1,), (2,), (2, 1)]:
        D = orbit(random_rational_flag(FlagShape(dims, 4), rng, spread=2), G)
        assert is_design(D, 2).passed
