from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vexillar.exactlinalg import RatMatrix
from vexillar.flags import (Flag, FlagError, FlagShape, FloatFlag, flag_from_bases, haar_sample, random_rational_flag,
                            random_rational_orthogonal, trace_pair)

shapes = st.sampled_from([((1,), 2), ((1,), 3), ((2,), 4), ((2, 1), 3), ((2, 1), 4), ((3, 1), 5), ((3, 2, 1), 4)])


def test_shape_validation_and_blocks():
    s = FlagShape((3, 1), 5)
    assert s.ell == 2 and s.m == 3
    assert s.block_sizes() == (1, 2, 2)
    assert FlagShape.from_json(s.to_json()) == s
    for bad in [((1, 2), 3), ((2,), 2), ((0,), 2), ((), 3)]:
        with pytest.raises(FlagError):
            FlagShape(*bad)


def test_coordinate_flag_projectors():
    F = flag_from_bases([[[1, 0, 0], [0, 1, 0]], [[1, 0, 0]]])
    assert F.shape == FlagShape((2, 1), 3)
    assert F.projectors[0] == RatMatrix.diag([1, 1, 0])
    assert F.projectors[1] == RatMatrix.diag([1, 0, 0])
    G = flag_from_bases([[[1, 1, 0], [1, -1, 0]], [[2, 0, 0]]])
    assert F == G


def test_non_nested_rejected():
    with pytest.raises(FlagError):
        flag_from_bases([[[1, 0, 0], [0, 1, 0]], [[0, 0, 1]]])
    with pytest.raises(FlagError):
        flag_from_bases([[[1, 0, 0]]], dims=(2,))


def test_invalid_projectors_rejected():
    s = FlagShape((1,), 2)
    with pytest.raises(FlagError):
        Flag(s, (RatMatrix.from_rows([[1, 1], [0, 0]]),))
    with pytest.raises(FlagError):
        Flag(s, (RatMatrix.diag([1, 1]),))


def test_trace_pair_examples():
    F = flag_from_bases([[[1, 0, 0], [0, 1, 0]], [[1, 0, 0]]])
    assert trace_pair(F, F, 1, 1) == 2 and trace_pair(F, F, 2, 2) == 1
    a = flag_from_bases([[[1, 0]]])
    b = flag_from_bases([[[0, 1]]])
    c = flag_from_bases([[[1, 1]]])
    assert trace_pair(a, b, 1, 1) == 0
    assert trace_pair(a, c, 1, 1) == Fraction(1, 2)
    with pytest.raises(FlagError):
        trace_pair(a, F, 1, 1)


def test_haar_sample_deterministic():
    s = FlagShape((2, 1), 5)
    x, y = haar_sample(s, 7), haar_sample(s, 7)
    assert x.X.tobytes() == y.X.tobytes()
    assert np.allclose(x.X.T @ x.X, np.eye(2))
    P1, P2 = x.projector(1), x.projector(2)
    assert np.allclose(P1 @ P2, P2)


def test_float_flag_rejects_non_orthonormal():
    with pytest.raises(FlagError):
        FloatFlag(FlagShape((1,), 2), np.array([[1.0], [1.0]]))


@given(shapes, st.integers(0, 2**32))
def test_projector_idempotent_and_nested(sh, seed):
    rng = np.random.default_rng(seed)
    F = random_rational_flag(FlagShape(*sh), rng)
    for i, P in enumerate(F.projectors):
        assert P @ P == P
        assert P.is_symmetric()
        assert P.trace() == F.shape.dims[i]
    for big, small in zip(F.projectors, F.projectors[1:]):
        assert big @ small == small == small @ big


@given(st.integers(2, 5), st.integers(0, 2**32))
def test_rational_orthogonal(n, seed):
    Q = random_rational_orthogonal(n, np.random.default_rng(seed))
    assert Q.T @ Q == RatMatrix.identity(n)


@given(shapes, st.integers(0, 2**32))
def test_transform_and_json_roundtrip(sh, seed):
    rng = np.random.default_rng(seed)
    F = random_rational_flag(FlagShape(*sh), rng)
    Q = random_rational_orthogonal(F.n, rng)
    G = F.transform(Q)
    G.validate()
    assert trace_pair(G, G, 1, 1) == F.shape.dims[0]
    assert Flag.from_json(F.to_json()) == F


def test_metric_flags():
    G = RatMatrix.from_rows([[2, -1], [-1, 2]])
    F = flag_from_bases([[[1, 0]]], metric=G)
    F.validate()
    assert F.projectors[0] @ F.projectors[0] == F.projectors[0]
    with pytest.raises(FlagError):
        trace_pair(F, flag_from_bases([[[1, 0]]]), 1, 1)
