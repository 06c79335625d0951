"""Admissible automorphisms of the beta-gamma / b-c superalgebra.

A triple ``(g, A, h)`` with ``g`` a coordinate change, ``A`` an invertible
M x M matrix of functions and ``h`` an N x N matrix acts by

    b^i   -> g^i(b)
    a^i   -> :a^j c^{ji}: - :psi^p phi^q: A^{qs} c^{ki} d_k (A^{-1})^{sp} + b^k' h^{ki}
    phi^i -> phi^j A^{ji}
    psi^i -> psi^j (A^{-1})^{ij}

with ``c = (dg)^{-1 t}``.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .cdoaut import apply_to_field, parse_generator
from .coordgroup import (
    CoordChange,
    _pullback_oneform,
    _sum,
    alpha,
    beta,
    compose_g,
)
from .ringmat import RingMatrix, TensorForm, trace_tensor
from .vertexengine import A as KA
from .vertexengine import B as KB
from .vertexengine import PHI, PSI, FieldClassError, FieldExpr, ope

HALF = mpq(1, 2)

__all__ = [
    "SuperAut",
    "apply_super_aut",
    "apply_super_to_field",
    "gamma_super",
    "delta_super",
    "delta_super_trace",
    "compose_super",
    "epsilon_cocycle",
    "epsilon_on",
    "h_mul",
    "super_ope_conditions",
    "compose_and_compare_super",
    "super_lift_curve",
    "super_order2_residual",
    "super_section",
]


@dataclass(frozen=True, eq=False)
class SuperAut:
    g: CoordChange
    A: RingMatrix
    h: RingMatrix

    def __post_init__(self):
        if self.A.rows != self.A.cols:
            raise ValueError("A must be square")
        if not self.A.det().is_unit():
            raise ValueError("A must be invertible")

    @classmethod
    def unit(cls, ring, m: int) -> "SuperAut":
        n = ring.nvars
        return cls(CoordChange.identity(ring), RingMatrix.identity(ring, m), RingMatrix.zeros(ring, n))

    @property
    def m(self) -> int:
        return self.A.rows

    def __mul__(self, other):
        return compose_super(self, other)

    def __eq__(self, other):
        if not isinstance(other, SuperAut):
            return NotImplemented
        return self.g == other.g and self.A == other.A and self.h == other.h

    __hash__ = None


def _fermion_correction(g: CoordChange, A: RingMatrix, i: int) -> FieldExpr:
    """``- :psi^p phi^q: A^{qs} c^{ki} d_k (A^{-1})^{sp}``."""
    ring = g.ring
    c = g.phi
    Ai = A.inverse()
    dAi = [Ai.partial(k) for k in range(ring.nvars)]
    m = A.rows
    out = FieldExpr(ring)
    for p in range(m):
        for q in range(m):
            coef = _sum(
                A[q, s] * c[k, i] * dAi[k][s, p] for s in range(m) for k in range(ring.nvars)
            )
            out = out - FieldExpr.monomial(ring, [(PSI, p, 0), (PHI, q, 0)], coef)
    return out


def apply_super_aut(x: SuperAut, gen) -> FieldExpr:
    kind, i = parse_generator(gen)
    g, A, h = x.g, x.A, x.h
    ring = g.ring
    n = ring.nvars
    if kind == "b":
        return FieldExpr.function(g.components[i])
    if kind == "a":
        c = g.phi
        out = FieldExpr(ring)
        for j in range(n):
            out = out + FieldExpr.monomial(ring, [(KA, j, 0)], c[j, i])
        out = out + _fermion_correction(g, A, i)
        for k in range(n):
            out = out + FieldExpr.monomial(ring, [(KB, k, 1)], h[k, i])
        return out
    if kind == "phi":
        out = FieldExpr(ring)
        for j in range(A.rows):
            out = out + FieldExpr.monomial(ring, [(PHI, j, 0)], A[j, i])
        return out
    if kind == "psi":
        Ai = A.inverse()
        out = FieldExpr(ring)
        for j in range(A.rows):
            out = out + FieldExpr.monomial(ring, [(PSI, j, 0)], Ai[i, j])
        return out
    raise FieldClassError(f"unknown generator {gen!r}")


def apply_super_to_field(x: SuperAut, f: FieldExpr) -> FieldExpr:
    names = {KA: "a", KB: "b", PSI: "psi", PHI: "phi"}
    return apply_to_field(x, f, image_of=lambda kind, i: apply_super_aut(x, (names[kind], i)))


def gamma_super(g1, A1, g2, A2) -> RingMatrix:
    """``d_i (A1^{-1})^{pr} A1^{rq} A2(g1)^{qs} c(g2)(g1)^{kj} [d_k (A2^{-1})^{sp}](g1)``."""
    ring = g1.ring
    n = ring.nvars
    m = A1.rows
    A1i = A1.inverse()
    dA1i = [A1i.partial(i) for i in range(n)]
    A2g = A2.substitute(g1)
    c2g = g2.phi.substitute(g1)
    A2i = A2.inverse()
    dA2ig = [A2i.partial(k).substitute(g1) for k in range(n)]
    # M1_i = d_i(A1^{-1}) A1 A2(g1);  M2_j = sum_k c2g^{kj} dA2ig_k
    M1 = [dA1i[i] @ A1 @ A2g for i in range(n)]
    M2 = []
    for j in range(n):
        acc = dA2ig[0].scale(c2g[0, j])
        for k in range(1, n):
            acc = acc + dA2ig[k].scale(c2g[k, j])
        M2.append(acc)
    return RingMatrix.from_fn(ring, n, n, lambda i, j: (M1[i] @ M2[j]).trace())


def delta_super(g1, A1, g2, A2) -> TensorForm:
    """``gamma_super . d(g1 g2)^t``."""
    return TensorForm(gamma_super(g1, A1, g2, A2) @ compose_g(g1, g2).jacobian.T)


def delta_super_trace(g1, A1, g2, A2) -> TensorForm:
    """``tr{dA1 A1^{-1} (x) A1 g1^*(dA2 A2^{-1}) A1^{-1}}``."""
    n = g1.n
    A1i = A1.inverse()
    P = [A1.partial(k) @ A1i for k in range(n)]
    A2i = A2.inverse()
    Q = _pullback_oneform(g1, [A2.partial(k) @ A2i for k in range(n)])
    Q = [A1 @ q @ A1i for q in Q]
    return trace_tensor(P, Q)


def compose_super(x1: SuperAut, x2: SuperAut) -> SuperAut:
    """``(g1 g2, A1 A2(g1), h1 c(g2)(g1) + dg1 h2(g1) + alpha - gamma_super)``."""
    g1, g2 = x1.g, x2.g
    h = (
        x1.h @ g2.phi.substitute(g1)
        + g1.jacobian @ x2.h.substitute(g1)
        + alpha(g1, g2)
        - gamma_super(g1, x1.A, g2, x2.A)
    )
    return SuperAut(compose_g(g1, g2), x1.A @ x2.A.substitute(g1), h)


def h_mul(x1: SuperAut, x2: SuperAut) -> SuperAut:
    """Product in ``H = G x| Mat_M`` (the ``h`` slot is carried along as zero)."""
    ring = x1.g.ring
    return SuperAut(compose_g(x1.g, x2.g), x1.A @ x2.A.substitute(x1.g), RingMatrix.zeros(ring, ring.nvars))


def epsilon_cocycle(g1, A1, g2, A2) -> TensorForm:
    """``beta(g1, g2) - delta_super(g1, A1, g2, A2)``."""
    return beta(g1, g2) - delta_super(g1, A1, g2, A2)


def epsilon_on(x1: SuperAut, x2: SuperAut) -> TensorForm:
    return epsilon_cocycle(x1.g, x1.A, x2.g, x2.A)


def super_ope_conditions(x: SuperAut) -> dict:
    """Check every defining OPE of the transformed generators.

    Returns a dict of booleans keyed by relation, plus the ``a~ a~``
    residuals ``order2`` and ``order1`` as in the bosonic case.
    """
    ring = x.g.ring
    n, m = ring.nvars, x.m
    at = [apply_super_aut(x, ("a", i)) for i in range(n)]
    bt = [apply_super_aut(x, ("b", i)) for i in range(n)]
    pt = [apply_super_aut(x, ("phi", i)) for i in range(m)]
    st = [apply_super_aut(x, ("psi", i)) for i in range(m)]
    one = FieldExpr.one(ring)
    zero = FieldExpr(ring)

    def simple(res, expect):
        return set(res.poles) <= {1} and res.get(1, ring) == expect

    out = {
        "psi~phi~": all(simple(ope(st[i], pt[j]), one if i == j else zero) for i in range(m) for j in range(m)),
        "phi~psi~": all(simple(ope(pt[i], st[j]), one if i == j else zero) for i in range(m) for j in range(m)),
        "psi~psi~": all(ope(st[i], st[j]).is_regular() for i in range(m) for j in range(m)),
        "phi~phi~": all(ope(pt[i], pt[j]).is_regular() for i in range(m) for j in range(m)),
        "a~phi~": all(ope(at[i], pt[j]).is_regular() for i in range(n) for j in range(m)),
        "a~psi~": all(ope(at[i], st[j]).is_regular() for i in range(n) for j in range(m)),
        "a~b~": all(simple(ope(at[i], bt[j]), one if i == j else zero) for i in range(n) for j in range(n)),
        "b~b~": all(ope(bt[i], bt[j]).is_regular() for i in range(n) for j in range(n)),
    }
    order2, order1 = [], []
    clean = True
    for i in range(n):
        r2, r1 = [], []
        for j in range(n):
            res = ope(at[i], at[j])
            p2, p1 = res.get(2, ring), res.get(1, ring)
            if res.max_order() > 2 or any(k != () for k in p2.support()):
                clean = False
            known = {((KB, s, 1),) for s in range(n)}
            if any(k not in known for k in p1.support()):
                clean = False
            r2.append(p2.coefficient(()))
            r1.append([p1.coefficient([(KB, s, 1)]) for s in range(n)])
        order2.append(r2)
        order1.append(r1)
    out["a~a~ shape"] = clean
    out["a~a~"] = clean and all(v.is_zero() for r in order2 for v in r) and all(
        v.is_zero() for r in order1 for c in r for v in c
    )
    out["order2"] = order2
    out["order1"] = order1
    return out


def compose_and_compare_super(x1: SuperAut, x2: SuperAut) -> bool:
    """Sequential action on all generators agrees with the law ``compose_super``."""
    x12 = compose_super(x1, x2)
    n, m = x1.g.n, x1.m
    gens = [("a", i) for i in range(n)] + [("b", i) for i in range(n)]
    gens += [("phi", i) for i in range(m)] + [("psi", i) for i in range(m)]
    for gen in gens:
        seq = apply_super_to_field(x1, apply_super_aut(x2, gen))
        if not seq == apply_super_aut(x12, gen):
            return False
    return True


def super_lift_curve(g: CoordChange, A: RingMatrix) -> SuperAut:
    """The unique ``h`` making ``(g, A, h)`` an automorphism when ``N = 1``.

    The order-2 coefficient of ``a~ a~`` is affine in the scalar ``h``,
    so two evaluations determine it.
    """
    ring = g.ring
    if g.n != 1:
        raise ValueError("super_lift_curve needs a one-variable coordinate change")

    def order2(h):
        return super_ope_conditions(SuperAut(g, A, RingMatrix(ring, [[h]])))["order2"][0][0]

    r0 = order2(ring.zero)
    slope = order2(ring.one) - r0
    return SuperAut(g, A, RingMatrix(ring, [[-r0 * slope.invert()]]))


def super_order2_residual(x: SuperAut) -> RingMatrix:
    """Constant coefficient of the double pole in ``a~^i(z) a~^j(w)``."""
    ring = x.g.ring
    n = ring.nvars
    at = [apply_super_aut(x, ("a", i)) for i in range(n)]
    return RingMatrix.from_fn(ring, n, n, lambda i, j: ope(at[i], at[j]).get(2, ring).coefficient(()))


def super_section(g: CoordChange, A: RingMatrix) -> SuperAut:
    """The lift of ``(g, A)`` whose tilde coordinate is symmetric.

    The double-pole residual depends on ``h`` only through
    ``phi^t (ht + ht^t) phi``, so ``ht = -J r0 J^t / 2`` with ``r0`` the
    residual at ``h = 0``.  For ``A = 1`` this is the bosonic section,
    for ``A = dg`` it is zero.
    """
    ring = g.ring
    J = g.jacobian
    r0 = super_order2_residual(SuperAut(g, A, RingMatrix.zeros(ring, ring.nvars)))
    ht = (J @ r0 @ J.T).scale(-HALF)
    return SuperAut(g, A, ht @ g.phi)
