"""Conformal anomaly of the Virasoro field under lifted automorphisms.

Two independent routes compute the transformed field ``L~``:

* the state route expands ``g(b(z))`` around the zero mode ``b_0`` and
  lets the ``z^1`` coefficient act on the state ``a~_{-1}|0>``;
* the field route substitutes generator images into ``:a^i b^i':`` with
  the Wick engine.

Both are compared with ``L - 1/2 T{ tr(dg^{-1} d_k dg) b^k' }``.
"""

from __future__ import annotations

from collections import Counter
from math import factorial

from gmpy2 import mpq

from .cdoaut import apply_aut, apply_to_field
from .coordgroup import CoordChange, LiftedAut, _sum, from_tilde, h_particular, to_tilde
from .ringmat import RingMatrix
from .superext import SuperAut, apply_super_to_field
from .vertexengine import (
    A,
    B,
    FieldExpr,
    StateVec,
    _apply_mode,
    field_to_state,
    nth_product,
    state_to_field,
    super_virasoro_field,
    translate,
    virasoro_field,
    weight,
)

__all__ = [
    "NotApplicable",
    "virasoro_state",
    "function_mode",
    "transform_virasoro",
    "transform_virasoro_fields",
    "trace_log_derivative",
    "anomaly_field",
    "check_anomaly_formula",
    "skew_corrected",
    "skew_correction_invariance",
    "constant_jacobian_conservation",
    "grading_preserved",
    "translation_equivariant",
    "anomaly_zero_mode_vanishes",
    "super_anomaly_candidate",
    "check_super_anomaly_candidate",
]

HALF = mpq(1, 2)


class NotApplicable(ValueError):
    """Raised when an atlas has a transition with non-constant Jacobian."""


# ---------------------------------------------------------------------------
# state route
# ---------------------------------------------------------------------------


def virasoro_state(ring) -> StateVec:
    """``sum_i a^i_{-1} b^i_{-1} |0>``."""
    out = StateVec(ring)
    for i in range(ring.nvars):
        out = out + StateVec.monomial(ring, [(A, i, 1), (B, i, 1)])
    return out


def _partitions(total, n, least=(1, 0)):
    """Multisets of ``(index, depth)`` with depths summing to ``total``."""
    if total == 0:
        yield ()
        return
    for depth in range(least[0], total + 1):
        for i in range(n):
            if (depth, i) < least:
                continue
            for rest in _partitions(total - depth, n, (depth, i)):
                yield ((i, depth),) + rest


def _a_weight(v: StateVec) -> int:
    return max((sum(d for k, _, d in key if k == A) for key in v.terms), default=0)


def function_mode(F, v: StateVec, k: int) -> StateVec:
    """The mode ``F_(k)`` of the function field ``F(b(z))`` applied to ``v``.

    ``F(b(z)) = sum_alpha d^alpha F(b_0) / alpha! prod (b(z) - b_0)^alpha``
    with ``b(z) - b_0 = sum_{n != 0} b_n z^{-n}``.  Positive modes
    annihilate ``a``-quanta, so only finitely many terms survive.
    """
    ring = v.ring
    n = ring.nvars
    out = StateVec(ring)
    for p in range(_a_weight(v) + 1):
        q = p - k - 1
        if q < 0:
            continue
        for ann in _partitions(p, n):
            w = v
            for i, d in ann:
                w = _apply_mode(B, i, d - 1, w)
            if not w.terms:
                continue
            for cre in _partitions(q, n):
                u = w
                for i, d in cre:
                    u = _apply_mode(B, i, -d - 1, u)
                factors = Counter(ann) + Counter((i, -d) for i, d in cre)
                coef = F
                denom = 1
                for mult in factors.values():
                    denom *= factorial(mult)
                for i, _ in ann + cre:
                    coef = coef.partial(i)
                out = out + u.scale(coef * mpq(1, denom))
    return out


def transform_virasoro(x: LiftedAut) -> FieldExpr:
    """``L~ = sum_i g^i(b(z))_{(-2)} a~^i_{-1}|0>`` read back as a field."""
    ring = x.g.ring
    out = StateVec(ring)
    for i in range(ring.nvars):
        at = field_to_state(apply_aut(x, ("a", i)))
        out = out + function_mode(x.g.components[i], at, -2)
    return state_to_field(out)


# ---------------------------------------------------------------------------
# field route and the anomaly formula
# ---------------------------------------------------------------------------


def transform_virasoro_fields(x) -> FieldExpr:
    """Image of ``L`` computed with the Wick engine."""
    if isinstance(x, SuperAut):
        return apply_super_to_field(x, super_virasoro_field(x.g.ring, x.m))
    return apply_to_field(x, virasoro_field(x.g.ring))


def trace_log_derivative(M: RingMatrix) -> list:
    """``d_k tr log M = tr(M^{-1} d_k M)`` for each ``k``."""
    Mi = M.inverse()
    return [(Mi @ M.partial(k)).trace() for k in range(M.ring.nvars)]


def _t_of_gradient(ring, grad) -> FieldExpr:
    one_form = FieldExpr(ring)
    for k, c in enumerate(grad):
        one_form = one_form + FieldExpr.monomial(ring, [(B, k, 1)], c)
    return translate(one_form)


def anomaly_field(g: CoordChange) -> FieldExpr:
    """``-1/2 (tr log dg(b(z)))''``."""
    return _t_of_gradient(g.ring, trace_log_derivative(g.jacobian)).scale(-HALF)


def check_anomaly_formula(x: LiftedAut) -> bool:
    """Both routes give ``L~ = L + anomaly_field(g)``."""
    ring = x.g.ring
    expect = virasoro_field(ring) + anomaly_field(x.g)
    return transform_virasoro(x) == expect and transform_virasoro_fields(x) == expect


def skew_corrected(x: LiftedAut, k: RingMatrix) -> LiftedAut:
    """Shift the tilde coordinate of ``x`` by the skew matrix ``k``.

    This is left multiplication by ``(1, k)``, so it keeps ``x`` natural
    exactly when ``k`` is closed.
    """
    if not (k + k.T).is_zero():
        raise ValueError("correction must be skew")
    return from_tilde(x.g, to_tilde(x) + k)


def skew_correction_invariance(x: LiftedAut, k: RingMatrix) -> bool:
    y = skew_corrected(x, k)
    return transform_virasoro(y) == transform_virasoro(x) and transform_virasoro_fields(
        y
    ) == transform_virasoro_fields(x)


def constant_jacobian_conservation(atlas) -> bool:
    """Every transition has constant Jacobian, hence ``L`` is glued to itself.

    ``atlas`` is anything with a ``transitions`` mapping to coordinate changes.
    """
    for key, g in atlas.transitions.items():
        if not g.jacobian.is_constant():
            raise NotApplicable(f"transition {key} has non-constant Jacobian")
    for g in atlas.transitions.values():
        x = LiftedAut(g, h_particular(g))
        if not anomaly_field(g).is_zero():
            return False
        if not transform_virasoro(x) == virasoro_field(g.ring):
            return False
    return True


# ---------------------------------------------------------------------------
# L_0 and L_{-1}
# ---------------------------------------------------------------------------


def grading_preserved(x, fields) -> bool:
    """The image of a homogeneous field is homogeneous of the same weight."""
    for f in fields:
        ws = {weight(key) for key in f.support()}
        if len(ws) != 1:
            raise ValueError("probe fields must be homogeneous")
        img = apply_to_field(x, f)
        if any(weight(key) not in ws for key in img.support()):
            return False
    return True


def translation_equivariant(x, fields) -> bool:
    """``x(T f) = T x(f)``."""
    return all(apply_to_field(x, translate(f)) == translate(apply_to_field(x, f)) for f in fields)


def anomaly_zero_mode_vanishes(x: LiftedAut, fields) -> bool:
    """``(L~ - L)_(0)`` kills every probe: the anomaly is a total derivative."""
    diff = transform_virasoro_fields(x) - virasoro_field(x.g.ring)
    return all(nth_product(diff, f, 0).is_zero() for f in fields)


# ---------------------------------------------------------------------------
# fermionic candidate
# ---------------------------------------------------------------------------


def super_anomaly_candidate(x: SuperAut) -> FieldExpr:
    """``-1/2 (tr log dg - tr log A)''`` as a field."""
    ring = x.g.ring
    dg = trace_log_derivative(x.g.jacobian)
    dA = trace_log_derivative(x.A)
    grad = [_sum([u, -v]) for u, v in zip(dg, dA)]
    return _t_of_gradient(ring, grad).scale(-HALF)


def check_super_anomaly_candidate(x: SuperAut) -> bool:
    ring = x.g.ring
    expect = super_virasoro_field(ring, x.m) + super_anomaly_candidate(x)
    return transform_virasoro_fields(x) == expect
