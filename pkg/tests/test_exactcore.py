import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointlab.errors import ShapeError
from jointlab.exactcore import Mat, Vec3, det3, det4, nullspace, primitive_integer, rank


def test_nullspace_symmetric_kernel():
    assert nullspace(Mat([[1, -1]])) == [(1, 1)]


def test_nullspace_identity_empty():
    assert nullspace(Mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == []


def test_nullspace_two_by_three():
    # Gaussian elimination by hand: z free, x = y = 0
    assert nullspace(Mat([[1, 0, 0], [0, 1, 0]])) == [(0, 0, 1)]


def test_det3_identity_and_zero_row():
    assert det3(Mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 1
    assert det3(Mat([[0, 0, 0], [1, 2, 3], [4, 5, 6]])) == 0


def test_det3_embedded_rotation():
    # cofactor expansion by hand
    assert det3(Mat([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])) == 1


def test_det4_identity_and_shape_error():
    assert det4(Mat([[1 if i == j else 0 for j in range(4)] for i in range(4)])) == 1
    with pytest.raises(ShapeError):
        det4(Mat([[1, 0], [0, 1]]))
    with pytest.raises(ShapeError):
        det3(Mat([[1, 0], [0, 1]]))


def test_vec3_ops():
    a = Vec3(1, 2, 3)
    b = Vec3(0, 1, 0)
    assert a.dot(b) == 2
    assert a.cross(b) == Vec3(-3, 0, 1)
    assert (a - a).is_zero()


def _rref_rank(rows: list[list[Fraction]]) -> int:
    """Brute-force rational row reduction, the independent rank oracle."""
    m = [row[:] for row in rows]
    nrows, ncols = len(m), len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [v / m[r][c] for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


small_fraction = st.fractions(
    min_value=-6, max_value=6, max_denominator=4
)


@given(
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=1, max_value=6),
    st.data(),
)
@settings(max_examples=120, deadline=None)
def test_rank_nullity_against_rref_oracle(nrows, ncols, data):
    rows = [
        [data.draw(small_fraction) for _ in range(ncols)] for _ in range(nrows)
    ]
    m = Mat(rows)
    basis = nullspace(m)
    assert rank(m) == _rref_rank(rows)
    assert rank(m) + len(basis) == ncols
    # every basis vector is an exact kernel element
    for v in basis:
        assert all(x == 0 for x in m.mul_vec(v))


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_nullspace_basis_independent(data):
    nrows = data.draw(st.integers(min_value=1, max_value=4))
    ncols = data.draw(st.integers(min_value=2, max_value=5))
    rows = [[data.draw(small_fraction) for _ in range(ncols)] for _ in range(nrows)]
    basis = nullspace(Mat(rows))
    if len(basis) >= 2:
        assert rank(Mat([list(v) for v in basis])) == len(basis)


def test_nullspace_vectors_canonical():
    rng = random.Random(7)
    for _ in range(30):
        rows = [[rng.randint(-4, 4) for _ in range(4)] for _ in range(2)]
        for v in nullspace(Mat(rows)):
            # primitive integers, positive first nonzero entry: renormalizing is a no-op
            assert v == primitive_integer(v)
            first = next(x for x in v if x != 0)
            assert first > 0


def test_rational_results_reduced():
    # Fraction keeps the canonical form: reduced, positive denominator
    v = Fraction(6, -4)
    assert (v.numerator, v.denominator) == (-3, 2)
    product = Fraction(2, 3) * Fraction(9, 4)
    assert (product.numerator, product.denominator) == (3, 2)


def test_primitive_integer_examples():
    assert primitive_integer((Fraction(1, 2), Fraction(-1, 3), 0)) == (3, -2, 0)
    assert primitive_integer((-2, -4, -6)) == (1, 2, 3)
