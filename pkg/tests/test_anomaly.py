import random

import pytest
from hypothesis import given, strategies as st

from chiralgerbe.anomaly import (
    NotApplicable,
    anomaly_field,
    anomaly_zero_mode_vanishes,
    check_anomaly_formula,
    check_super_anomaly_candidate,
    constant_jacobian_conservation,
    function_mode,
    grading_preserved,
    skew_correction_invariance,
    trace_log_derivative,
    transform_virasoro,
    transform_virasoro_fields,
    translation_equivariant,
    virasoro_state,
)
from chiralgerbe.cechglue import GluingData
from chiralgerbe.coordgroup import CoordChange, LiftedAut, h_particular
from chiralgerbe.diffring import RatFnRing, SeriesRing
from chiralgerbe.randinst import random_closed_skew, random_coord_change, random_invertible_matrix
from chiralgerbe.ringmat import RingMatrix
from chiralgerbe.superext import SuperAut, super_lift_curve
from chiralgerbe.vertexengine import B, FieldExpr, StateVec, field_to_state, nth_product, state_to_field, virasoro_field

seeds = st.integers(0, 10**6)


def _natural(g):
    return LiftedAut(g, h_particular(g))


def test_anomaly_frozen_curve():
    # -1/2 (log(1 + 2b))'' = 2/(1+2b)^2 b'b' - 1/(1+2b) b''
    R = RatFnRing(1)
    b = R.gens[0]
    g = CoordChange([b + b * b])
    u = 1 + 2 * b
    expect = FieldExpr.monomial(R, [(B, 0, 1), (B, 0, 1)], 2 / (u * u)) + FieldExpr.monomial(R, [(B, 0, 2)], -1 / u)
    assert anomaly_field(g) == expect
    x = _natural(g)
    assert transform_virasoro(x) == virasoro_field(R) + expect
    assert transform_virasoro_fields(x) == virasoro_field(R) + expect


def test_inversion_anomaly():
    # g = 1/b: tr log dg = log(-1/b^2), so the anomaly is -1/2 (-2 log b)'' = (b'/b)'
    R = RatFnRing(1)
    b = R.gens[0]
    g = CoordChange([1 / b])
    expect = FieldExpr.monomial(R, [(B, 0, 2)], 1 / b) + FieldExpr.monomial(R, [(B, 0, 1), (B, 0, 1)], -1 / (b * b))
    assert anomaly_field(g) == expect
    assert check_anomaly_formula(_natural(g))


def test_function_mode_of_coordinate():
    # b(z)_(-1)|0> = b_0 |0>, b(z)_(-2)|0> = b_{-1}|0>
    R = RatFnRing(1)
    vac = StateVec.monomial(R, [])
    b = R.gens[0]
    assert function_mode(b, vac, -1) == vac.scale(b)
    assert function_mode(b, vac, -2) == StateVec.monomial(R, [(B, 0, 1)])


def test_function_mode_matches_field_product():
    R = RatFnRing(2)
    b1, b2 = R.gens
    F = b1 * b1 * b2 + b2
    v = virasoro_state(R)
    F_field = FieldExpr.function(F)
    for k in (-2, -1, 0, 1):
        assert function_mode(F, v, k) == field_to_state(nth_product(F_field, state_to_field(v), k))


def test_trace_log_derivative():
    R = RatFnRing(1)
    b = R.gens[0]
    assert trace_log_derivative(RingMatrix(R, [[1 + b * b]])) == [2 * b / (1 + b * b)]


def test_nonconstant_jacobian_not_applicable():
    R = RatFnRing(1)
    atlas = GluingData(R, ("U", "V"), {("U", "V"): CoordChange([R.gens[0] + R.gens[0] ** 2])})
    with pytest.raises(NotApplicable):
        constant_jacobian_conservation(atlas)


def test_affine_atlas_conserves():
    R = RatFnRing(2)
    b1, b2 = R.gens
    g = CoordChange([2 * b1 + b2 + 1, b2 - 3])
    gi = CoordChange([(b1 - 1 - (b2 + 3)) / 2, b2 + 3])
    atlas = GluingData(R, ("U", "V"), {("U", "V"): g, ("V", "U"): gi})
    assert constant_jacobian_conservation(atlas)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_two_routes(n):
    S = SeriesRing(n, 6)
    rng = random.Random(n)
    for _ in range(3):
        assert check_anomaly_formula(_natural(random_coord_change(S, rng)))


@given(seeds)
def test_skew_correction_invariance(seed):
    S = SeriesRing(2, 6)
    rng = random.Random(seed)
    x = _natural(random_coord_change(S, rng))
    assert skew_correction_invariance(x, random_closed_skew(S, rng, degree=2))


@given(seeds)
def test_l0_l_minus_one(seed):
    S = SeriesRing(2, 6)
    rng = random.Random(seed)
    x = _natural(random_coord_change(S, rng))
    a, L = FieldExpr.a(S, 0), virasoro_field(S)
    probes = [a, FieldExpr.b(S, 1), L, nth_product(a, FieldExpr.a(S, 1), -1)]
    assert grading_preserved(x, probes)
    assert translation_equivariant(x, probes)
    assert anomaly_zero_mode_vanishes(x, probes)


@given(seeds)
def test_super_candidate_on_curves(seed):
    S = SeriesRing(1, 6)
    rng = random.Random(seed)
    g = random_coord_change(S, rng)
    A = random_invertible_matrix(S, rng, 1, degree=2)
    assert check_super_anomaly_candidate(super_lift_curve(g, A))


def test_super_candidate_tangent():
    S = SeriesRing(2, 6)
    g = random_coord_change(S, random.Random(4))
    assert check_super_anomaly_candidate(SuperAut(g, g.jacobian, RingMatrix.zeros(S, 2)))
