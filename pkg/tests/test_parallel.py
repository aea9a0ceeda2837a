import numpy as np
from hypothesis import given, settings, strategies as st

from vexillar.parallel import exact_AtB, map_ordered, to_int_array


def square(x):
    return x * x


def test_map_ordered_keeps_order():
    assert map_ordered(square, list(range(20)), workers=1) == [x * x for x in range(20)]
    assert map_ordered(square, list(range(20)), workers=3) == [x * x for x in range(20)]
    assert map_ordered(square, [], workers=2) == []


@settings(max_examples=30)
@given(st.integers(0, 2**32), st.sampled_from([1, 2 ** 20, 2 ** 40, 2 ** 80]), st.integers(1, 3))
def test_exact_AtB_matches_python_ints(seed, scale, workers):
    rng = np.random.default_rng(seed)
    A = (rng.integers(-5, 6, (37, 4)).astype(object) * scale)
    B = rng.integers(-5, 6, (37, 3)).astype(object) * scale
    want = np.array([[sum(int(A[k, i]) * int(B[k, j]) for k in range(37)) for j in range(3)] for i in range(4)],
                    dtype=object)
    got = exact_AtB(A, B, workers=workers, max_rows=8)
    assert (got == want).all()


def test_no_float_rounding_near_2_53():
    big = 2 ** 26 + 1
    A = np.array([[big]] * 8, dtype=object)
    got = exact_AtB(A, A)
    assert int(got[0, 0]) == 8 * big * big


def test_to_int_array():
    a = to_int_array([[1, 2], [3, 4]])
    assert a.tolist() == [[1, 2], [3, 4]]
    assert to_int_array([[2 ** 70]]).tolist() == [[2 ** 70]]
