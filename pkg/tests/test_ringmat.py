import random

import pytest
from hypothesis import given, strategies as st

from chiralgerbe.diffring import NotAUnit, RatFnRing, SeriesRing
from chiralgerbe.randinst import (
    as_form,
    random_closed_skew,
    random_coord_change,
    random_invertible_matrix,
    random_matrix,
    random_skew,
)
from chiralgerbe.ringmat import NotSkew, RingMatrix, TensorForm, is_closed, jacobian, skew_part, sym_part
from conftest import mat_to_sympy

seeds = st.integers(0, 10**6)


def test_jacobian_convention():
    R = RatFnRing(2)
    b1, b2 = R.gens
    J = jacobian([b1 * b2, b2])
    # entry (i, j) is d_i g^j
    assert J[0, 0] == b2 and J[1, 0] == b1 and J[0, 1] == R.zero


def test_inverse_matches_sympy():
    R = RatFnRing(2)
    b1, b2 = R.gens
    M = RingMatrix(R, [[1 + b1, b2], [b1 * b2, 2]])
    assert (mat_to_sympy(M.inverse()) - mat_to_sympy(M).inv()).applyfunc(lambda e: e.simplify()).is_zero_matrix


def test_singular_matrix():
    R = RatFnRing(1)
    with pytest.raises(NotAUnit):
        RingMatrix(R, [[R.gens[0], 1], [R.gens[0], 1]]).inverse()


def test_closedness_needs_skew():
    R = RatFnRing(3)
    with pytest.raises(NotSkew):
        is_closed(TensorForm(RingMatrix.identity(R, 3)))


def test_non_closed_two_form():
    # b3 db1 ^ db2 has d = db3 ^ db1 ^ db2 != 0
    R = RatFnRing(3)
    b3 = R.gens[2]
    t = TensorForm(RingMatrix.from_fn(R, 3, 3, lambda i, j: {(0, 1): b3, (1, 0): -b3}.get((i, j), R.zero)))
    assert t.is_skew() and not is_closed(t)


@given(seeds)
def test_inverse_series(seed):
    S = SeriesRing(2, 5)
    M = random_invertible_matrix(S, random.Random(seed), 2)
    assert (M @ M.inverse()) == RingMatrix.identity(S, 2)


@given(seeds)
def test_det_multiplicative(seed):
    R = RatFnRing(2)
    rng = random.Random(seed)
    M, P = random_matrix(R, rng, degree=2), random_matrix(R, rng, degree=2)
    assert (M @ P).det() == M.det() * P.det()


@given(seeds)
def test_skew_sym_split(seed):
    S = SeriesRing(3, 4)
    t = as_form(random_matrix(S, random.Random(seed)))
    assert skew_part(t) + sym_part(t) == t
    assert skew_part(t).is_skew() and sym_part(t).is_symmetric()


@given(seeds)
def test_random_closed_skew_is_closed(seed):
    S = SeriesRing(3, 5)
    rng = random.Random(seed)
    assert is_closed(as_form(random_closed_skew(S, rng)))
    k = random_skew(S, rng)
    assert k.T == -k


@given(seeds)
def test_pullback_functorial(seed):
    # (g1 g2)^* = g1^* g2^*
    from chiralgerbe.coordgroup import compose_g

    S = SeriesRing(2, 5)
    rng = random.Random(seed)
    g1, g2 = random_coord_change(S, rng), random_coord_change(S, rng)
    t = as_form(random_matrix(S, rng, degree=2))
    assert t.pullback(compose_g(g1, g2)) == t.pullback(g2).pullback(g1)


@given(seeds)
def test_pullback_preserves_closed(seed):
    S = SeriesRing(3, 5)
    rng = random.Random(seed)
    g = random_coord_change(S, rng)
    t = as_form(random_closed_skew(S, rng, degree=2))
    assert is_closed(t.pullback(g))
