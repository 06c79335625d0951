"""Verification suites behind the command line.

Each suite is a list of named identities, each run over seeded random
trials.  Reports are plain data so that text and structured output are
both deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .anomaly import (
    NotApplicable,
    anomaly_zero_mode_vanishes,
    check_super_anomaly_candidate,
    constant_jacobian_conservation,
    grading_preserved,
    skew_correction_invariance,
    transform_virasoro,
    transform_virasoro_fields,
    anomaly_field,
    translation_equivariant,
)
from .cdoaut import (
    canonical_lift_curve,
    compose_and_compare,
    is_natural,
    is_natural_ope,
    ope_matches_residuals,
)
from .cechglue import (
    GluingData,
    closed_skew,
    cocycle_consistency,
    discrepancies,
    discrepancy,
    lift_transitions,
    projective_atlas,
    super_discrepancies,
    swap_relation,
)
from .coordgroup import (
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
    h_particular,
    inverse_g,
    solve_46a,
    to_tilde,
)
from .diffring import RatFnRing, RingError, SeriesRing
from .randinst import (
    random_closed_skew,
    random_coord_change,
    random_invertible_matrix,
    random_matrix,
    random_skew,
    random_symmetric,
)
from .ringmat import RingMatrix, is_closed, skew_part
from .superext import (
    SuperAut,
    compose_and_compare_super,
    compose_super,
    delta_super,
    delta_super_trace,
    epsilon_cocycle,
    epsilon_on,
    h_mul,
    super_lift_curve,
    super_ope_conditions,
)
from .vertexengine import B, FieldExpr, nth_product, translate, virasoro_field

__all__ = ["SUITES", "Params", "CheckResult", "Report", "run_suite", "run_cech", "cech_checks"]

SUITES = ("group-law", "cocycles", "automorphisms", "super", "anomaly", "cech")

_FERMIONIC_KEYS = ("psi~phi~", "phi~psi~", "psi~psi~", "phi~phi~", "a~phi~", "a~psi~")


@dataclass(frozen=True)
class Params:
    n: int = 2
    m: int = 1
    deg: int = 6
    trials: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("--n and --m must be at least 1")
        if self.deg < 3:
            raise ValueError("--deg must be at least 3")
        if self.trials < 1:
            raise ValueError("--trials must be at least 1")


@dataclass
class CheckResult:
    tag: str
    title: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def as_dict(self) -> dict:
        out = {"tag": self.tag, "title": self.title, "passed": self.passed, "total": self.total, "ok": self.ok}
        if self.failures:
            out["failures"] = self.failures
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    suite: str
    params: dict
    checks: list
    extra: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def as_dict(self) -> dict:
        out = {"suite": self.suite, "params": self.params, "ok": self.ok, "checks": [c.as_dict() for c in self.checks]}
        if self.extra:
            out["details"] = self.extra
        return out

    def to_text(self) -> str:
        head = " ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [f"suite {self.suite}: {head}"]
        for c in self.checks:
            mark = "PASS" if c.ok else "FAIL"
            lines.append(f"  [{mark}] {c.tag:<22} {c.title}  ({c.passed}/{c.total})")
            for f in c.failures:
                lines.append(f"         {f}")
            if c.note:
                lines.append(f"         note: {c.note}")
        for d in self.extra:
            lines.append(f"  {d}")
        lines.append("overall: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"


class _Runner:
    def __init__(self, params: Params):
        self.p = params
        self.checks: list[CheckResult] = []
        self.extra: list[str] = []

    def rng(self, tag, t):
        return random.Random(f"{self.p.seed}/{tag}/{t}")

    def trials(self, tag, title, fn, count=None, note=""):
        res = CheckResult(tag, title, note=note)
        for t in range(self.p.trials if count is None else count):
            res.total += 1
            try:
                ok = bool(fn(self.rng(tag, t)))
            except RingError as exc:
                ok = False
                res.failures.append(f"trial {t}: {type(exc).__name__}: {exc}")
                continue
            if ok:
                res.passed += 1
            else:
                res.failures.append(f"trial {t}: identity does not hold")
        self.checks.append(res)

    def once(self, tag, title, fn, note=""):
        self.trials(tag, title, lambda _rng: fn(), count=1, note=note)

    def series(self, n=None):
        return SeriesRing(self.p.n if n is None else n, self.p.deg)


def _g(ring, rng):
    return random_coord_change(ring, rng)


def _gs(ring, rng, k):
    return [random_coord_change(ring, rng) for _ in range(k)]


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _group_law(r: _Runner):
    S = r.series()

    def chain(rng):
        g1, g2 = _gs(S, rng, 2)
        return compose_g(g1, g2).jacobian == g1.jacobian @ g2.jacobian.substitute(g1)

    def assoc(rng):
        g1, g2, g3 = _gs(S, rng, 3)
        return compose_g(compose_g(g1, g2), g3) == compose_g(g1, compose_g(g2, g3))

    def unit_inverse(rng):
        g = _g(S, rng)
        e = CoordChange.identity(S)
        gi = inverse_g(g)
        return (
            compose_g(g, e) == g
            and compose_g(e, g) == g
            and compose_g(g, gi).is_identity()
            and compose_g(gi, g).is_identity()
        )

    def lifted(rng):
        x1, x2, x3 = (LiftedAut(_g(S, rng), random_matrix(S, rng)) for _ in range(3))
        e = LiftedAut.unit(S)
        return (
            compose_gprime(compose_gprime(x1, x2), x3) == compose_gprime(x1, compose_gprime(x2, x3))
            and compose_gprime(x1, e) == x1
            and compose_gprime(e, x1) == x1
        )

    def tilde(rng):
        x1, x2 = (LiftedAut(_g(S, rng), random_matrix(S, rng)) for _ in range(2))
        g12, ht = compose_tilde(x1.g, to_tilde(x1), x2.g, to_tilde(x2))
        return ht == to_tilde(compose_gprime(x1, x2))

    r.trials("(4.2)", "chain rule d(g1 g2) = dg1 . dg2(g1)", chain)
    r.trials("(4.1)", "associativity of composition in G", assoc)
    r.trials("(4.1)", "unit and inverse in G", unit_inverse)
    r.trials("(4.8)", "associativity and unit of the lifted law", lifted)
    r.trials("(4.10)", "tilde-coordinate law", tilde)


def _cocycles(r: _Runner):
    S = r.series()

    def three_way(rng):
        g1, g2 = _gs(S, rng, 2)
        b = beta(g1, g2)
        return beta_from_alpha(g1, g2) == b and beta_index(g1, g2) == b

    def coc(f):
        def run(rng):
            g1, g2, g3 = _gs(S, rng, 3)
            return cocycle_check(f, g1, g2, g3)

        return run

    def c_skew(rng):
        g1, g2 = _gs(S, rng, 2)
        c = cocycle_c(g1, g2)
        return c.is_skew() and c == skew_part(beta(g1, g2))

    def c_closed(rng):
        g1, g2 = _gs(S, rng, 2)
        return is_closed(cocycle_c(g1, g2))

    def gamma_forms(rng):
        g1, g2 = _gs(S, rng, 2)
        gm = gamma_skew(g1, g2)
        return gm == gamma_skew(g1, g2, form=2) and gm == cocycle_c(g1, g2)

    r.trials("(4.11)=(4.15)=(4.16)", "three expressions for beta agree", three_way)
    r.trials("(4.14)", "cocycle identity for beta", coc(beta))
    r.trials("(4.14)", "cocycle identity for c (5.5)", coc(cocycle_c))
    r.trials("(4.14)", "cocycle identity for gamma (5.6)", coc(gamma_skew))
    r.trials("(5.5)", "c is skew and equals the skew part of beta", c_skew)
    if r.p.n <= 2:
        # closedness follows once the section is natural, which is only known for N <= 2
        r.trials("(5.5)", "c is closed", c_closed)
    r.trials("(5.6)", "both wedge forms of gamma agree with c", gamma_forms)


def _automorphisms(r: _Runner):
    n = r.p.n
    S = r.series()

    def lemma_a(rng):
        g = _g(S, rng)
        return check_46a(LiftedAut(g, h_particular(g)))

    def lemma_b(rng):
        g = _g(S, rng)
        return check_46b(LiftedAut(g, h_particular(g)))

    def ope_char(rng):
        g = _g(S, rng)
        xs = [LiftedAut(g, h_particular(g)), LiftedAut(g, random_matrix(S, rng, degree=2))]
        return all(ope_matches_residuals(x) and is_natural_ope(x) == is_natural(x) for x in xs)

    def fail_a():
        # symmetric perturbation breaks the double-pole condition
        R = RatFnRing(n)
        g = CoordChange([v + v * v for v in R.gens])
        x = LiftedAut(g, h_particular(g) + RingMatrix.identity(R, n))
        return not check_46a(x) and not is_natural_ope(x)

    def fail_b():
        # b3 db1^db2 is skew but not closed; every 2-form in two variables is closed
        R = RatFnRing(3)
        b3 = R.gens[2]

        def entry(i, j):
            return {(0, 1): b3, (1, 0): -b3}.get((i, j), R.zero)

        x = from_tilde(CoordChange.identity(R), RingMatrix.from_fn(R, 3, 3, entry))
        return check_46a(x) and not check_46b(x) and not is_natural_ope(x)

    def sequential(rng):
        x1, x2 = (LiftedAut(_g(S, rng), random_matrix(S, rng, degree=2)) for _ in range(2))
        return compose_and_compare(x1, x2)

    def kernel(rng):
        e = CoordChange.identity(S)
        k1, k2 = random_closed_skew(S, rng), random_closed_skew(S, rng)
        y = compose_gprime(from_tilde(e, k1), from_tilde(e, k2))
        ok = to_tilde(y) == k1 + k2 and is_natural(from_tilde(e, k1))
        sym = random_symmetric(S, rng, degree=1)
        if not sym.is_zero():
            ok = ok and not is_natural(from_tilde(e, sym))
        return ok

    def solution_set(rng):
        g = _g(S, rng)
        part, basis = solve_46a(g)
        Ji = g.jacobian_inv
        skew = random_skew(S, rng)
        hp = h_particular(g)
        return (
            len(basis) == n * (n - 1) // 2
            and all((Ji @ K + (Ji @ K).T).is_zero() for K in basis)
            and ((Ji @ (part - hp)) + (Ji @ (part - hp)).T).is_zero()
            and check_46a(LiftedAut(g, hp + g.jacobian @ skew))
        )

    r.trials("Lemma 6.1 (4.6a)", "(g, h_particular(g)) solves the double-pole equation", lemma_a)
    note = ""
    if n >= 3:
        note = "fails for generic N >= 3; natural_correction finds a skew repair"
    r.trials("Lemma 6.1 (4.6b)", "(g, h_particular(g)) solves the first-order equation", lemma_b, note=note)
    if n <= 2:
        r.trials("(2.1)<=>(4.6a,b)", "OPE pole coefficients equal the ring residuals", ope_char)
        r.once("(2.1)<=>(4.6a,b)", "constructed instance failing (4.6a)", fail_a)
        r.once("(2.1)<=>(4.6a,b)", "constructed instance failing only (4.6b)", fail_b)
        r.trials("(4.8)/(4.10)", "sequential action on generators matches the group law", sequential)
    r.trials("Thm 6.2", "kernel: natural iff skew closed; additive law", kernel)
    r.trials("(4.6a)", "solutions are h_particular + dg . skew (linear solve)", solution_set)
    if n == 1:

        def curve(rng):
            g = _g(S, rng)
            part, basis = solve_46a(g)
            return canonical_lift_curve(g).h == h_particular(g) and not basis

        def inversion():
            R = RatFnRing(1)
            g = CoordChange([1 / R.gens[0]])
            x = canonical_lift_curve(g)
            return x.h == RingMatrix(R, [[R.const(-2)]]) and is_natural(x)

        r.trials("(5.1)=(5.3)", "unique one-variable lift equals the particular section", curve)
        r.once("(6.2)", "lift of g = 1/b has h = -2", inversion)


def _super(r: _Runner):
    S = r.series()
    m = r.p.m

    def rand_super(rng):
        g = _g(S, rng)
        A = random_invertible_matrix(S, rng, m, degree=2)
        return SuperAut(g, A, random_matrix(S, rng, degree=2))

    def lemma71(rng):
        g1, g2 = _gs(S, rng, 2)
        A1, A2 = (random_invertible_matrix(S, rng, m, degree=2) for _ in range(2))
        return delta_super(g1, A1, g2, A2) == delta_super_trace(g1, A1, g2, A2)

    def assoc(rng):
        x1, x2, x3 = (rand_super(rng) for _ in range(3))
        return compose_super(compose_super(x1, x2), x3) == compose_super(x1, compose_super(x2, x3))

    def eps(rng):
        xs = [rand_super(rng) for _ in range(3)]
        return cocycle_check(epsilon_on, *xs, mul=h_mul, act=lambda x, tf: tf.pullback(x.g))

    def sequential(rng):
        return compose_and_compare_super(rand_super(rng), rand_super(rng))

    def fermionic(rng):
        res = super_ope_conditions(rand_super(rng))
        return all(res[k] for k in _FERMIONIC_KEYS)

    def tangent(rng):
        g = _g(S, rng)
        x = SuperAut(g, g.jacobian, RingMatrix.zeros(S, S.nvars))
        res = super_ope_conditions(x)
        return epsilon_cocycle(g, g.jacobian, g, g.jacobian).is_zero() and all(
            v for k, v in res.items() if k not in ("order2", "order1")
        )

    r.trials("Lemma 7.1", "(7.5) and (7.6) give the same delta", lemma71)
    r.trials("(7.3)", "associativity of the super law", assoc)
    r.trials("(7.8)", "cocycle identity for epsilon", eps)
    r.trials("(7.2a-d)/(7.3)", "sequential action matches the super law", sequential)
    r.trials("(7.1)", "fermionic OPEs preserved by (7.2a-d)", fermionic)
    if m == S.nvars:
        r.trials("Prop 7.3", "A = dg: epsilon vanishes and (g, dg, 0) is an automorphism", tangent)


def _affine_atlas(n, rng) -> GluingData:
    R = RatFnRing(n)
    M = random_invertible_matrix(R, rng, n, degree=0)
    shift = [R.const(rng.choice((-1, 1, 2))) for _ in range(n)]
    g = CoordChange([sum((R.gens[i] * M[i, j] for i in range(n)), R.zero) + shift[j] for j in range(n)])
    gi = _inverse_affine(g, M, shift)
    return GluingData(R, ("U", "V"), {("U", "V"): g, ("V", "U"): gi}, name="affine")


def _inverse_affine(g, M, shift):
    R = g.ring
    n = R.nvars
    Mi = M.inverse()
    y = [R.gens[j] - shift[j] for j in range(n)]
    return CoordChange([sum((y[j] * Mi[j, i] for j in range(n)), R.zero) for i in range(n)])


def _anomaly(r: _Runner):
    n = r.p.n
    S = r.series()
    L = virasoro_field(S)

    def natural(rng):
        g = _g(S, rng)
        return LiftedAut(g, h_particular(g))

    def state_route(rng):
        x = natural(rng)
        return transform_virasoro(x) == L + anomaly_field(x.g)

    def field_route(rng):
        x = natural(rng)
        return transform_virasoro_fields(x) == L + anomaly_field(x.g)

    def skew(rng):
        return skew_correction_invariance(natural(rng), random_closed_skew(S, rng, degree=2))

    def probes():
        a, b = FieldExpr.a(S, 0), FieldExpr.b(S, n - 1)
        return [a, b, translate(a), L, nth_product(a, FieldExpr.a(S, n - 1), -1), FieldExpr.monomial(S, [(B, 0, 1)], S.gens[0])]

    def conserved(rng):
        x = natural(rng)
        ps = probes()
        return grading_preserved(x, ps) and translation_equivariant(x, ps) and anomaly_zero_mode_vanishes(x, ps)

    def constant_jac(rng):
        ok = constant_jacobian_conservation(_affine_atlas(n, rng))
        R = RatFnRing(1)
        bad = GluingData(R, ("U", "V"), {("U", "V"): CoordChange([R.gens[0] + R.gens[0] ** 2])})
        try:
            constant_jacobian_conservation(bad)
        except NotApplicable:
            return ok
        return False

    def candidate(rng):
        R1 = SeriesRing(1, r.p.deg)
        g = _g(R1, rng)
        A = random_invertible_matrix(R1, rng, 1, degree=2)
        return check_super_anomaly_candidate(super_lift_curve(g, A))

    r.trials("(9.2) via (9.3)-(9.5)", "state-level transform of L equals L - (tr log dg)''/2", state_route)
    r.trials("(9.2)", "field-level transform of L equals L - (tr log dg)''/2", field_route)
    r.trials("9.3", "skew closed correction leaves L~ unchanged", skew)
    r.trials("9.2", "L_0 and L_-1 conserved (grading, T-equivariance, zero mode)", conserved)
    r.trials("Cor 9.3", "constant-Jacobian atlases conserve L", constant_jac)
    r.trials(
        "9.4",
        "candidate (tr log dg - tr log A)''/2 for N = 1",
        candidate,
        note="conjectural form, checked only",
    )


def _fmt_form(t) -> str:
    n = t.n
    rows = ["[" + ", ".join(str(t[i, j]) for j in range(n)) + "]" for i in range(n)]
    return "[" + ", ".join(rows) + "]"


def cech_checks(r: _Runner, data: GluingData):
    lifts = lift_transitions(data)
    r.once("(5.4)", f"{data.name}: every lifted transition is natural", lambda: all(is_natural(x) for x in lifts.values()))
    charts = data.charts
    if len(charts) < 3:
        triples = [(i, j, i) for i in charts for j in charts if i != j]
    else:
        triples = list(data.triples())
    forms = {t: discrepancy(data, *t, lifts) for t in triples}
    for t, c in forms.items():
        r.extra.append(f"c{t} = {_fmt_form(c)}")
    r.once("3", f"{data.name}: discrepancies are skew and closed", lambda: all(closed_skew(c) for c in forms.values()))
    if data.n == 1:
        r.once("3", f"{data.name}: all discrepancies vanish (curve)", lambda: all(c.is_zero() for c in forms.values()))
    else:
        r.once("3", f"{data.name}: some triple discrepancy is nonzero", lambda: any(not c.is_zero() for c in forms.values()))
    if len(charts) >= 3:
        i, j, k = triples[0]
        r.once("3", f"{data.name}: swap relation c_ijk + c_ikj = g_ij^* c_jkj", lambda: swap_relation(data, i, j, k))
    if len(charts) >= 4:
        r.once("3", f"{data.name}: Cech cocycle condition on quadruple overlaps", lambda: cocycle_consistency(data))
    if data.bundle is not None:
        sd = super_discrepancies(data)
        for t, c in sd.items():
            r.extra.append(f"c_super{t} = {_fmt_form(c)}")
        r.once("(7.8)", f"{data.name}: super discrepancies are skew and closed", lambda: all(closed_skew(c) for c in sd.values()))


def _cech(r: _Runner):
    cech_checks(r, projective_atlas(1))
    cech_checks(r, projective_atlas(2))
    p2t = projective_atlas(2, "tangent")
    r.once("Thm 8.1", "P2 with E = T_X: super discrepancy vanishes", lambda: all(c.is_zero() for c in super_discrepancies(p2t).values()))
    p2o = projective_atlas(2, "O(1)")
    r.once(
        "Thm 8.1",
        "P2 with E = O(1): super discrepancy is a nonzero closed 2-form",
        lambda: all(closed_skew(c) and not c.is_zero() for c in super_discrepancies(p2o).values()),
    )
    p2triv = projective_atlas(2, "trivial")
    r.once(
        "Thm 8.1",
        "P2 with trivial E: super discrepancy equals the bosonic one",
        lambda: super_discrepancies(p2triv) == discrepancies(p2triv),
    )
    if r.p.n >= 3:
        cech_checks(r, projective_atlas(3))


_RUNNERS = {
    "group-law": _group_law,
    "cocycles": _cocycles,
    "automorphisms": _automorphisms,
    "super": _super,
    "anomaly": _anomaly,
    "cech": _cech,
}


def run_suite(name: str, params: Params) -> Report:
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}")
    params.validate()
    r = _Runner(params)
    _RUNNERS[name](r)
    shown = {"n": params.n, "deg": params.deg, "trials": params.trials, "seed": params.seed}
    if name == "super":
        shown["m"] = params.m
    if name == "cech":
        shown = {"n": params.n}
    return Report(name, shown, r.checks, r.extra)


def run_cech(data: GluingData) -> Report:
    r = _Runner(Params(n=data.n, trials=1))
    cech_checks(r, data)
    return Report("cech", {"atlas": data.name}, r.checks, r.extra)
