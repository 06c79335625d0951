"""The group of coordinate changes and its extensions by 2-tensors.

Elements of the coordinate group are N-tuples ``g = (g^1(b), ..., g^N(b))``
composed by ``(g1 g2)^i(b) = g2^i(g1(b))``.  A lifted automorphism is a
pair ``(g, h)`` with ``h`` an N x N matrix; such pairs act on the fields
``b, a`` by

    b^i -> g^i(b),    a^i -> a^j phi^{ji}(g) + b^k' h^{ki},

with ``phi(g) = (dg)^{-1 t}``.  This module holds the purely ring-level
side of the story: the group laws in both coordinate systems, the
automorphism equations on ``h``, the particular section and the explicit
2-cocycles.  The field-level side lives in :mod:`chiralgerbe.cdoaut`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

from gmpy2 import mpq

from .diffring import NotAUnit, SubstitutionError, Substituter, parse_list, substitute
from .ringmat import RingMatrix, TensorForm, jacobian, skew_part, trace_tensor

__all__ = [
    "CoordChange",
    "LiftedAut",
    "compose_g",
    "phi",
    "psi",
    "alpha",
    "beta",
    "beta_index",
    "beta_from_alpha",
    "compose_gprime",
    "to_tilde",
    "from_tilde",
    "compose_tilde",
    "gprime_inverse",
    "residual_46a",
    "residual_46b",
    "check_46a",
    "check_46b",
    "h_particular",
    "h_curve",
    "section_s",
    "cocycle_c",
    "gamma_skew",
    "cocycle_check",
    "cocycle_defect",
    "solve_46a",
    "inverse_g",
    "natural_correction",
]

HALF = mpq(1, 2)


class CoordChange:
    """An invertible coordinate change ``b -> g(b)``."""

    def __init__(self, components: Sequence, *, check: bool = True):
        comps = tuple(components)
        if not comps:
            raise ValueError("empty coordinate change")
        ring = comps[0].ring
        comps = tuple(ring.coerce(c) for c in comps)
        if len(comps) != ring.nvars:
            raise ValueError(f"need {ring.nvars} components, got {len(comps)}")
        self.ring = ring
        self.components = comps
        if check:
            if ring.kind == "series" and any(c.constant_term() != 0 for c in comps):
                raise SubstitutionError("series coordinate changes must fix the origin")
            det = self.jacobian.det()
            if not det.is_unit():
                raise NotAUnit("coordinate change with degenerate Jacobian")

    @classmethod
    def identity(cls, ring) -> "CoordChange":
        return cls(ring.gens, check=False)

    @classmethod
    def parse(cls, text: str, ring) -> "CoordChange":
        """Parse ``g: [b1 + b1^2, b2 - b1*b2]`` (the ``g:`` prefix is optional)."""
        body = re.sub(r"^\s*\w+\s*:", "", text.strip())
        return cls(parse_list(body, ring))

    @property
    def n(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    @cached_property
    def substituter(self) -> Substituter:
        return Substituter(self.components)

    @cached_property
    def jacobian(self) -> RingMatrix:
        return jacobian(self.components)

    @cached_property
    def jacobian_inv(self) -> RingMatrix:
        return self.jacobian.inverse()

    @cached_property
    def phi(self) -> RingMatrix:
        return self.jacobian_inv.T

    def __mul__(self, other: "CoordChange") -> "CoordChange":
        return compose_g(self, other)

    def is_identity(self) -> bool:
        return all((c - v).is_zero() for c, v in zip(self.components, self.ring.gens))

    def __eq__(self, other):
        if not isinstance(other, CoordChange):
            return NotImplemented
        return all(x == y for x, y in zip(self.components, other.components))

    __hash__ = None

    def __repr__(self):
        return "g: [" + ", ".join(str(c) for c in self.components) + "]"


def compose_g(g1: CoordChange, g2: CoordChange) -> CoordChange:
    """``(g1 g2)^i = g2^i(g1(b))``."""
    return CoordChange([substitute(c, g1) for c in g2.components], check=False)


def phi(g: CoordChange) -> RingMatrix:
    """``(dg)^{-1 t}``."""
    return g.phi


def psi(g: CoordChange) -> RingMatrix:
    """``psi^{ij} = d_r phi^{pi} d_p phi^{rj}``; symmetric."""
    ph = g.phi
    n = g.n
    dphi = [ph.partial(r) for r in range(n)]
    return RingMatrix.from_fn(
        g.ring,
        n,
        n,
        lambda i, j: _sum(dphi[r][p, i] * dphi[p][r, j] for p in range(n) for r in range(n)),
    )


def alpha(g1: CoordChange, g2: CoordChange) -> RingMatrix:
    """``alpha^{ij} = d_i phi^{pq}(g1) d_p[phi^{qj}(g2)(g1(b))]``."""
    n = g1.n
    p1 = g1.phi
    p2 = g2.phi.substitute(g1)
    d1 = [p1.partial(i) for i in range(n)]
    d2 = [p2.partial(p) for p in range(n)]
    return RingMatrix.from_fn(
        g1.ring,
        n,
        n,
        lambda i, j: _sum(d1[i][p, q] * d2[p][q, j] for p in range(n) for q in range(n)),
    )


def _pullback_oneform(g: CoordChange, form: Sequence[RingMatrix]) -> list[RingMatrix]:
    """``g^*(sum_k M_k db^k) = sum_l [sum_k d_l g^k M_k(g(b))] db^l``."""
    n = g.n
    J = g.jacobian
    subbed = [m.substitute(g) for m in form]
    out = []
    for l in range(n):
        acc = subbed[0].scale(J[l, 0])
        for k in range(1, n):
            acc = acc + subbed[k].scale(J[l, k])
        out.append(acc)
    return out


def beta(g1: CoordChange, g2: CoordChange) -> TensorForm:
    """``tr{dg1^{-1} d(dg1) (x) g1^*(d(dg2) . dg2^{-1})}``."""
    n = g1.n
    P = [g1.jacobian_inv @ g1.jacobian.partial(k) for k in range(n)]
    Q0 = [g2.jacobian.partial(k) @ g2.jacobian_inv for k in range(n)]
    return trace_tensor(P, _pullback_oneform(g1, Q0))


def beta_index(g1: CoordChange, g2: CoordChange) -> TensorForm:
    """Index form: ``(dg1^{-1})^{qa} d_i d_a g1^b d_j[(d_b g2^r)(g1)] (dg2^{-1})(g1)^{rq}``."""
    n = g1.n
    J1i = g1.jacobian_inv
    J2s = g2.jacobian.substitute(g1)
    J2is = g2.jacobian_inv.substitute(g1)
    second = [[[g1.components[b].partial(a).partial(i) for b in range(n)] for a in range(n)] for i in range(n)]
    dJ2s = [J2s.partial(j) for j in range(n)]

    def entry(i, j):
        terms = []
        for q in range(n):
            for a in range(n):
                for b in range(n):
                    left = J1i[q, a] * second[i][a][b]
                    for r in range(n):
                        terms.append(left * dJ2s[j][b, r] * J2is[r, q])
        return _sum(terms)

    return TensorForm(RingMatrix.from_fn(g1.ring, n, n, entry))


def beta_from_alpha(g1: CoordChange, g2: CoordChange) -> TensorForm:
    """``alpha(g1, g2) . d(g1 g2)^t``."""
    return TensorForm(alpha(g1, g2) @ compose_g(g1, g2).jacobian.T)


# ---------------------------------------------------------------------------
# lifted automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LiftedAut:
    """A pair ``(g, h)`` in raw coordinates."""

    g: CoordChange
    h: RingMatrix

    @classmethod
    def unit(cls, ring) -> "LiftedAut":
        return cls(CoordChange.identity(ring), RingMatrix.zeros(ring, ring.nvars))

    @property
    def ring(self):
        return self.g.ring

    def __mul__(self, other: "LiftedAut") -> "LiftedAut":
        return compose_gprime(self, other)

    def __eq__(self, other):
        if not isinstance(other, LiftedAut):
            return NotImplemented
        return self.g == other.g and self.h == other.h

    __hash__ = None


def compose_gprime(x1: LiftedAut, x2: LiftedAut) -> LiftedAut:
    """``(g1, h1)(g2, h2) = (g1 g2, h1 phi(g2)(g1) + dg1 h2(g1) + alpha(g1, g2))``."""
    g1, g2 = x1.g, x2.g
    h = x1.h @ g2.phi.substitute(g1) + g1.jacobian @ x2.h.substitute(g1) + alpha(g1, g2)
    return LiftedAut(compose_g(g1, g2), h)


def to_tilde(x: LiftedAut) -> RingMatrix:
    """The tilde coordinate ``ht`` with ``(g, ht)~ = (g, ht dg^{-1 t})``."""
    return x.h @ x.g.jacobian.T


def from_tilde(g: CoordChange, ht: RingMatrix) -> LiftedAut:
    return LiftedAut(g, ht @ g.phi)


def compose_tilde(g1, ht1, g2, ht2) -> tuple[CoordChange, RingMatrix]:
    """Tilde-coordinate law ``(g1 g2, ht1 + dg1 ht2(g1) dg1^t + beta(g1, g2))``."""
    J1 = g1.jacobian
    ht = ht1 + J1 @ ht2.substitute(g1) @ J1.T + beta(g1, g2).mat
    return compose_g(g1, g2), ht


def gprime_inverse(x: LiftedAut, g_inv: CoordChange) -> LiftedAut:
    """Inverse of ``x`` given the inverse coordinate change ``g_inv``.

    Solves ``x . (g_inv, k) = (1, 0)`` for ``k``.
    """
    g = x.g
    rhs = -(x.h @ g_inv.phi.substitute(g) + alpha(g, g_inv))
    k_at_g = g.jacobian_inv @ rhs
    return LiftedAut(g_inv, k_at_g.substitute(g_inv))


def residual_46a(x: LiftedAut) -> RingMatrix:
    """``h^t phi + phi^t h - psi``; zero iff the order-2 OPE condition holds."""
    ph = x.g.phi
    return x.h.T @ ph + ph.T @ x.h - psi(x.g)


def residual_46b(x: LiftedAut) -> list[list[list]]:
    """``R[i][j][s]`` of the first-order automorphism condition.

    ``phi^{pi} d_p h^{sj} - phi^{pj} d_p h^{si} + d_s phi^{pi} h^{pj}
    + d_s h^{pi} phi^{pj} - d_s d_r phi^{pi} d_p phi^{rj}``
    """
    g, h = x.g, x.h
    n = g.n
    ph = g.phi
    dph = [ph.partial(k) for k in range(n)]
    ddph = [[dph[r].partial(s) for r in range(n)] for s in range(n)]
    dh = [h.partial(k) for k in range(n)]
    R = []
    for i in range(n):
        Ri = []
        for j in range(n):
            Rij = []
            for s in range(n):
                terms = []
                for p in range(n):
                    terms.append(ph[p, i] * dh[p][s, j])
                    terms.append(-(ph[p, j] * dh[p][s, i]))
                    terms.append(dph[s][p, i] * h[p, j])
                    terms.append(dh[s][p, i] * ph[p, j])
                    for r in range(n):
                        terms.append(-(ddph[s][r][p, i] * dph[p][r, j]))
                Rij.append(_sum(terms))
            Ri.append(Rij)
        R.append(Ri)
    return R


def check_46a(x: LiftedAut) -> bool:
    return residual_46a(x).is_zero()


def check_46b(x: LiftedAut) -> bool:
    return all(v.is_zero() for Ri in residual_46b(x) for Rij in Ri for v in Rij)


def h_particular(g: CoordChange) -> RingMatrix:
    """``phi^t(g)^{-1} psi(g) / 2``."""
    return (g.phi.T.inverse() @ psi(g)).scale(HALF)


def h_curve(g: CoordChange):
    """One-variable lift ``g''^2 / (2 g'^3)``."""
    if g.n != 1:
        raise ValueError("h_curve is defined for one variable only")
    d1 = g.components[0].partial(0)
    d2 = d1.partial(0)
    return d2 * d2 * (d1 * d1 * d1 * 2).invert()


def section_s(g: CoordChange) -> RingMatrix:
    """Tilde coordinate of ``(g, h_particular(g))``; equals ``dg psi dg^t / 2``."""
    return to_tilde(LiftedAut(g, h_particular(g)))


def cocycle_c(g1: CoordChange, g2: CoordChange) -> TensorForm:
    """``beta + s(g1) - s(g1 g2) + dg1 s(g2)(g1) dg1^t``."""
    J1 = g1.jacobian
    s12 = section_s(compose_g(g1, g2))
    mat = beta(g1, g2).mat + section_s(g1) - s12 + J1 @ section_s(g2).substitute(g1) @ J1.T
    return TensorForm(mat)


def gamma_skew(g1: CoordChange, g2: CoordChange, form: int = 1) -> TensorForm:
    """Wedge version of ``beta``.

    ``form=1``: ``tr{dg1^{-1} d(dg1) ^ g1^*(d(dg2) dg2^{-1})}``;
    ``form=2``: ``tr{d(dg1) dg1^{-1} ^ dg1 g1^*[d(dg2) dg2^{-1}] dg1^{-1}}``.
    The wedge of 1-forms is normalised so that ``P ^ Q = (P(x)Q - Q(x)P)/2``.
    """
    n = g1.n
    J1, J1i = g1.jacobian, g1.jacobian_inv
    Q = _pullback_oneform(g1, [g2.jacobian.partial(k) @ g2.jacobian_inv for k in range(n)])
    if form == 1:
        P = [J1i @ J1.partial(k) for k in range(n)]
    elif form == 2:
        P = [J1.partial(k) @ J1i for k in range(n)]
        Q = [J1 @ q @ J1i for q in Q]
    else:
        raise ValueError("form must be 1 or 2")

    def entry(k, l):
        return ((P[k] @ Q[l]).trace() - (P[l] @ Q[k]).trace()) * HALF

    return TensorForm(RingMatrix.from_fn(g1.ring, n, n, entry))


# ---------------------------------------------------------------------------
# cocycle identity
# ---------------------------------------------------------------------------


def _default_mul(x, y):
    return compose_g(x, y)


def _default_act(x, t: TensorForm) -> TensorForm:
    return t.pullback(x)


def cocycle_defect(
    f: Callable,
    x1,
    x2,
    x3,
    mul: Callable = _default_mul,
    act: Callable = _default_act,
) -> TensorForm:
    """``f(x1,x2) - f(x1,x2x3) + f(x1x2,x3) - x1^* f(x2,x3)``."""
    x12 = mul(x1, x2)
    x23 = mul(x2, x3)
    return f(x1, x2) - f(x1, x23) + f(x12, x3) - act(x1, f(x2, x3))


def cocycle_check(f: Callable, x1, x2, x3, mul: Callable = _default_mul, act: Callable = _default_act) -> bool:
    return cocycle_defect(f, x1, x2, x3, mul, act).is_zero()


# ---------------------------------------------------------------------------
# solving the order-2 condition as a linear system
# ---------------------------------------------------------------------------


def solve_46a(g: CoordChange) -> tuple[RingMatrix, list[RingMatrix]]:
    """General solution of ``h^t phi + phi^t h = psi`` over the coefficient ring.

    Unknowns are the N^2 entries of ``h``; there is one equation per pair
    ``i <= j``.  Returns a particular solution (free unknowns set to zero)
    and a basis of the solution space of the homogeneous system.
    """
    ring = g.ring
    n = g.n
    ph = g.phi
    ps = psi(g)
    rows = []
    rhs = []
    for i in range(n):
        for j in range(i, n):
            row = [ring.zero] * (n * n)
            for p in range(n):
                row[p * n + i] = row[p * n + i] + ph[p, j]
                row[p * n + j] = row[p * n + j] + ph[p, i]
            rows.append(row)
            rhs.append(ps[i, j])
    pivots, rows, rhs = _rref(rows, rhs, n * n)
    free = [c for c in range(n * n) if c not in pivots]

    def to_matrix(vec):
        return RingMatrix.from_fn(ring, n, n, lambda p, q: vec[p * n + q])

    particular = [ring.zero] * (n * n)
    for r, c in enumerate(pivots):
        particular[c] = rhs[r]
    basis = []
    for f in free:
        vec = [ring.zero] * (n * n)
        vec[f] = ring.one
        for r, c in enumerate(pivots):
            vec[c] = -rows[r][f]
        basis.append(to_matrix(vec))
    return to_matrix(particular), basis


def _rref(rows, rhs, ncols):
    rows = [list(r) for r in rows]
    rhs = list(rhs)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        piv = next((k for k in range(r, len(rows)) if rows[k][c].is_unit()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        inv = rows[r][c].invert()
        rows[r] = [x * inv for x in rows[r]]
        rhs[r] = rhs[r] * inv
        for k in range(len(rows)):
            if k != r:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
                rhs[k] = rhs[k] - f * rhs[r]
        pivots.append(c)
        r += 1
    for k in range(r, len(rows)):
        if not all(x.is_zero() for x in rows[k]):
            raise NotAUnit("elimination stalled on a non-unit pivot")
        if not rhs[k].is_zero():
            raise ValueError("inconsistent linear system")
    return pivots, rows[: len(pivots)], rhs[: len(pivots)]


def _sum(terms):
    it = iter(terms)
    acc = next(it)
    for t in it:
        acc = acc + t
    return acc


def inverse_g(g: CoordChange) -> CoordChange:
    """Compositional inverse ``f`` with ``g(f(b)) = b``.

    Series mode uses the fixed-point iteration ``f <- f - J0^{-1}(g(f) - b)``
    with ``J0`` the linear part, which gains one degree per step.  Rational
    transition functions are inverted by the caller, not here.
    """
    ring = g.ring
    if ring.kind != "series":
        raise NotImplementedError("inverse_g handles series coordinate changes only")
    n = g.n
    J0 = RingMatrix.from_fn(ring, n, n, lambda i, j: ring.const(g.jacobian[i, j].constant_term()))
    J0i = J0.inverse()
    f = [ring.coerce(v) for v in ring.gens]
    gens = ring.gens
    for _ in range(ring.degree + 1):
        gf = [substitute(c, CoordChange(f, check=False)) for c in g.components]
        err = [x - v for x, v in zip(gf, gens)]
        if all(e.is_zero() for e in err):
            break
        f = [f[j] - _sum(err[i] * J0i[i, j] for i in range(n)) for j in range(n)]
    return CoordChange(f)


def natural_correction(g: CoordChange, degree: int = 2, den=None):
    """A skew ``k`` with ``(g, section_s(g) + k)`` (tilde coordinates) natural.

    Rational mode.  The ansatz is ``k_pq = P_pq / den`` with ``P_pq`` a
    polynomial of degree ``<= degree``.  The first-order residual is affine
    in ``k``, so clearing denominators equation by equation gives a linear
    system over Q.  Returns ``None`` when the ansatz admits no solution.
    """
    from sympy import Matrix

    ring = g.ring
    if ring.kind != "rational":
        raise NotImplementedError("natural_correction works in rational mode")
    n = g.n
    den = ring.one if den is None else ring.coerce(den)
    s_g = section_s(g)

    def residual(k):
        R = residual_46b(from_tilde(g, s_g + k))
        return [v for Ri in R for Rij in Ri for v in Rij]

    def basis(p, q, c):
        def entry(i, j):
            if (i, j) == (p, q):
                return c
            if (i, j) == (q, p):
                return -c
            return ring.zero

        return RingMatrix.from_fn(ring, n, n, entry)

    base = residual(RingMatrix.zeros(ring, n))
    monos = [m for d in range(degree + 1) for m in _exponents(n, d)]
    unknowns, columns = [], []
    for p in range(n):
        for q in range(p + 1, n):
            for mono in monos:
                c = ring.one
                for v, e in zip(ring.gens, mono):
                    for _ in range(e):
                        c = c * v
                unknowns.append((p, q, c / den))
                columns.append([v - b for v, b in zip(residual(basis(p, q, c / den)), base)])

    rows, rhs = [], []
    for e, b in enumerate(base):
        entries = [b] + [col[e] for col in columns]
        common = ring.poly_ring.one
        for x in entries:
            common = common.lcm(x.den)
        polys = [x.num * common.exquo(x.den) for x in entries]
        terms = [dict(f.terms()) for f in polys]
        for m in sorted({m for t in terms for m in t}):
            rhs.append(-terms[0].get(m, 0))
            rows.append([t.get(m, 0) for t in terms[1:]])
    if not unknowns:
        return RingMatrix.zeros(ring, n) if all(b.is_zero() for b in base) else None
    aug = Matrix(rows).row_join(Matrix(rhs)) if rows else Matrix.zeros(0, len(unknowns) + 1)
    red, pivots = aug.rref()
    if len(unknowns) in pivots:
        return None
    k = RingMatrix.zeros(ring, n)
    for r, col in enumerate(pivots):
        val = red[r, len(unknowns)]
        if val:
            p, q, c = unknowns[col]
            k = k + basis(p, q, c * mpq(int(val.p), int(val.q)))
    return k


def _exponents(n, d):
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _exponents(n - 1, d - first):
            yield (first,) + rest
