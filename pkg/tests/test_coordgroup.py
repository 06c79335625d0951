import random

import pytest
import sympy as sp
from hypothesis import given, strategies as st

import oracle
from chiralgerbe.coordgroup import (
    CoordChange,
    LiftedAut,
    beta,
    beta_from_alpha,
    beta_index,
    check_46a,
    check_46b,
    cocycle_c,
    cocycle_check,
    compose_g,
    compose_gprime,
    compose_tilde,
    from_tilde,
    gamma_skew,
    gprime_inverse,
    h_curve,
    h_particular,
    inverse_g,
    natural_correction,
    section_s,
    solve_46a,
    to_tilde,
)
from chiralgerbe.diffring import RatFnRing, SeriesRing
from chiralgerbe.randinst import random_coord_change, random_matrix, random_skew
from chiralgerbe.ringmat import RingMatrix, is_closed
from conftest import mat_to_sympy, sympy_equal

seeds = st.integers(0, 10**6)


def _rational(n):
    R = RatFnRing(n)
    return R, R.gens


# frozen values ------------------------------------------------------------


def test_inversion_lift_is_minus_two():
    R, (b,) = _rational(1)
    assert h_particular(CoordChange([1 / b])) == RingMatrix(R, [[R.const(-2)]])


def test_curve_lift_frozen():
    # oracle: g''^2 / (2 g'^3) for g = b + b^2
    R, (b,) = _rational(1)
    g = CoordChange([b + b * b])
    expect = 2 / (1 + 2 * b) ** 3
    assert h_curve(g) == expect
    assert h_particular(g)[0, 0] == expect


def test_beta_frozen():
    # oracle: beta((b1 + b2^2, b2), (b1, b2 + b1^2)) = [[0, 0], [4, 8 b2]]
    R, (b1, b2) = _rational(2)
    g1 = CoordChange([b1 + b2 * b2, b2])
    g2 = CoordChange([b1, b2 + b1 * b1])
    expect = RingMatrix(R, [[0, 0], [4, 8 * b2]])
    assert beta(g1, g2).mat == expect
    assert beta_index(g1, g2).mat == expect


def test_h_particular_matches_oracle():
    R, (b1, b2) = _rational(2)
    bs = oracle.symbols(2)
    g = CoordChange([b1 + b1 * b2, b2 + b1 * b1])
    ref = oracle.h_particular([bs[0] + bs[0] * bs[1], bs[1] + bs[0] ** 2], bs)
    assert sympy_equal(mat_to_sympy(h_particular(g)), ref)


def test_lifted_law_matches_oracle():
    R, (b1, b2) = _rational(2)
    x1, x2 = oracle.symbols(2)
    bs = [x1, x2]
    g1 = CoordChange([b1 + b2 * b2, b2 + b1])
    g2 = CoordChange([b1 * (1 + b2), b2])
    h1 = RingMatrix(R, [[b1, 1], [0, b2]])
    h2 = RingMatrix(R, [[0, b2], [b1 * b1, 2]])
    y = compose_gprime(LiftedAut(g1, h1), LiftedAut(g2, h2))
    gs, hs = oracle.compose_lift(
        ([x1 + x2**2, x2 + x1], sp.Matrix([[x1, 1], [0, x2]])),
        ([x1 * (1 + x2), x2], sp.Matrix([[0, x2], [x1**2, 2]])),
        bs,
    )
    assert sympy_equal(mat_to_sympy(y.h), hs)
    assert sp.expand(gs[0]) == sp.expand(sp.sympify(str(y.g[0]).replace("^", "**")))


def test_lemma_fails_for_three_variables():
    # the particular section is not natural for this N = 3 change,
    # but a rational skew correction restores (4.6b)
    R, (b1, b2, b3) = _rational(3)
    g = CoordChange([b1 + b2 * b2, b2 + b3 * b3, b3 + b1 * b1])
    assert check_46a(LiftedAut(g, h_particular(g)))
    assert not check_46b(LiftedAut(g, h_particular(g)))
    k = natural_correction(g, degree=1, den=g.jacobian.det())
    assert k is not None and (k + k.T).is_zero()
    # frozen: k^{12} = 4 b3 / det dg
    assert k[0, 1] == 4 * b3 / (1 + 8 * b1 * b2 * b3)
    x = from_tilde(g, section_s(g) + k)
    assert check_46a(x) and check_46b(x)


def test_natural_correction_trivial_when_already_natural():
    R, (b1, b2, b3) = _rational(3)
    g = CoordChange([b1, b2 + b1 * b3, b3])
    assert check_46b(LiftedAut(g, h_particular(g)))
    assert natural_correction(g, degree=0).is_zero()


# properties ---------------------------------------------------------------


@given(seeds)
def test_inverse_g(seed):
    S = SeriesRing(2, 5)
    g = random_coord_change(S, random.Random(seed))
    gi = inverse_g(g)
    assert compose_g(g, gi).is_identity() and compose_g(gi, g).is_identity()


@given(seeds)
def test_gprime_inverse(seed):
    S = SeriesRing(2, 5)
    rng = random.Random(seed)
    x = LiftedAut(random_coord_change(S, rng), random_matrix(S, rng, degree=2))
    xi = gprime_inverse(x, inverse_g(x.g))
    y = compose_gprime(x, xi)
    assert y.g.is_identity() and y.h.is_zero()


@given(seeds)
def test_tilde_law(seed):
    S = SeriesRing(2, 5)
    rng = random.Random(seed)
    x1, x2 = (LiftedAut(random_coord_change(S, rng), random_matrix(S, rng, degree=2)) for _ in range(2))
    _, ht = compose_tilde(x1.g, to_tilde(x1), x2.g, to_tilde(x2))
    assert ht == to_tilde(compose_gprime(x1, x2))


@given(seeds)
def test_beta_three_ways_and_cocycle(seed):
    S = SeriesRing(2, 6)
    rng = random.Random(seed)
    g1, g2, g3 = (random_coord_change(S, rng) for _ in range(3))
    b = beta(g1, g2)
    assert beta_index(g1, g2) == b == beta_from_alpha(g1, g2)
    assert cocycle_check(beta, g1, g2, g3)


@given(seeds)
def test_c_and_gamma(seed):
    S = SeriesRing(2, 6)
    rng = random.Random(seed)
    g1, g2, g3 = (random_coord_change(S, rng) for _ in range(3))
    c = cocycle_c(g1, g2)
    assert c.is_skew() and is_closed(c)
    assert gamma_skew(g1, g2) == c == gamma_skew(g1, g2, form=2)
    assert cocycle_check(cocycle_c, g1, g2, g3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_particular_section_solves_46a(n):
    S = SeriesRing(n, 6)
    rng = random.Random(n)
    for _ in range(5):
        g = random_coord_change(S, rng)
        assert check_46a(LiftedAut(g, h_particular(g)))


@pytest.mark.parametrize("n", [1, 2])
def test_particular_section_solves_46b(n):
    S = SeriesRing(n, 6)
    rng = random.Random(10 + n)
    for _ in range(5):
        g = random_coord_change(S, rng)
        assert check_46b(LiftedAut(g, h_particular(g)))


@given(seeds)
def test_solution_set_of_46a(seed):
    S = SeriesRing(3, 5)
    rng = random.Random(seed)
    g = random_coord_change(S, rng)
    part, basis = solve_46a(g)
    assert len(basis) == 3
    assert check_46a(LiftedAut(g, part))
    assert check_46a(LiftedAut(g, h_particular(g) + g.jacobian @ random_skew(S, rng)))
    # a symmetric shift leaves the solution set
    assert not check_46a(LiftedAut(g, h_particular(g) + RingMatrix.identity(S, 3)))
