"""Cech discrepancies of lifted transition functions on concrete atlases.

Transitions ``g_ij`` send chart ``i`` coordinates to chart ``j``
coordinates, so ``compose_g(g_ij, g_jk) = g_ik``.  Lifting every
transition by the section gives ``x_ij``; on a triple overlap

    x_ij x_jk = (1, c_ijk) x_ik

and ``c_ijk`` (a tilde coordinate, written in chart ``i``) is the
discrepancy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from pathlib import Path

from .coordgroup import CoordChange, LiftedAut, compose_g, compose_gprime, h_particular, to_tilde
from .diffring import RatFnRing, parse_expr, parse_list
from .ringmat import RingMatrix, TensorForm, is_closed
from .superext import SuperAut, compose_super, super_section

__all__ = [
    "IncompatibleGluing",
    "GluingData",
    "projective_atlas",
    "parse_atlas",
    "load_atlas",
    "lift_transitions",
    "discrepancy",
    "discrepancies",
    "cocycle_consistency",
    "swap_relation",
    "closed_skew",
    "lift_super_transitions",
    "super_discrepancy",
    "super_discrepancies",
]


class IncompatibleGluing(ValueError):
    """Transitions or bundle matrices do not compose consistently."""


@dataclass(frozen=True)
class GluingData:
    ring: RatFnRing
    charts: tuple
    transitions: dict
    bundle: dict | None = None
    name: str = "atlas"

    def __post_init__(self):
        self.validate()

    @property
    def n(self) -> int:
        return self.ring.nvars

    def transition(self, i, j) -> CoordChange:
        if i == j:
            return CoordChange.identity(self.ring)
        try:
            return self.transitions[(i, j)]
        except KeyError:
            raise IncompatibleGluing(f"no transition from {i} to {j}") from None

    def bundle_matrix(self, i, j) -> RingMatrix:
        if self.bundle is None:
            raise IncompatibleGluing("atlas carries no bundle datum")
        if i == j:
            m = next(iter(self.bundle.values())).rows
            return RingMatrix.identity(self.ring, m)
        return self.bundle[(i, j)]

    def triples(self):
        """Triples ``i < j < k`` (in chart order) whose transitions all exist."""
        for i, j, k in combinations(self.charts, 3):
            if all(p in self.transitions for p in ((i, j), (j, k), (i, k))):
                yield i, j, k

    def validate(self) -> None:
        for (i, j), g in self.transitions.items():
            if i == j and not g.is_identity():
                raise IncompatibleGluing(f"g_{i}{i} is not the identity")
            if g.ring != self.ring:
                raise IncompatibleGluing("transitions over different rings")
        for i, j, k in permutations(self.charts, 3):
            pairs = ((i, j), (j, k), (i, k))
            if not all(p in self.transitions for p in pairs):
                continue
            gij, gjk, gik = (self.transitions[p] for p in pairs)
            if not compose_g(gij, gjk) == gik:
                raise IncompatibleGluing(f"g_{i}{j} g_{j}{k} != g_{i}{k}")
            if self.bundle is not None:
                Aij, Ajk, Aik = (self.bundle[p] for p in pairs)
                if not (Aij @ Ajk.substitute(gij)) == Aik:
                    raise IncompatibleGluing(f"A_{i}{j} A_{j}{k} != A_{i}{k}")
        for i, j in self.transitions:
            if (j, i) in self.transitions and i != j:
                if not compose_g(self.transitions[(i, j)], self.transitions[(j, i)]).is_identity():
                    raise IncompatibleGluing(f"g_{j}{i} is not the inverse of g_{i}{j}")


# ---------------------------------------------------------------------------
# built-in atlases and file format
# ---------------------------------------------------------------------------


def _pn_transition(ring, n, i, j) -> CoordChange:
    """Chart ``i`` has coordinates ``x_k / x_i`` for ``k != i`` in increasing order."""
    gens = ring.gens
    homog = {}
    pos = 0
    for k in range(n + 1):
        if k == i:
            homog[k] = ring.one
        else:
            homog[k] = gens[pos]
            pos += 1
    return CoordChange([homog[k] / homog[j] for k in range(n + 1) if k != j])


def projective_atlas(n: int, bundle: str | None = None) -> GluingData:
    """Standard affine atlas of ``P^n``.

    ``bundle`` may be ``"tangent"`` (``A_ij = dg_ij``), ``"O(1)"``
    (``A_ij = x_j / x_i``) or ``"trivial"``.
    """
    ring = RatFnRing(n)
    charts = tuple(range(n + 1))
    trans = {(i, j): _pn_transition(ring, n, i, j) for i in charts for j in charts if i != j}
    bmap = None
    if bundle == "tangent":
        bmap = {p: g.jacobian for p, g in trans.items()}
    elif bundle == "O(1)":
        bmap = {}
        for (i, j), g in trans.items():
            # x_j / x_i in chart i is the coordinate indexed by j
            pos = j if j < i else j - 1
            bmap[(i, j)] = RingMatrix(ring, [[ring.gens[pos]]])
    elif bundle == "trivial":
        bmap = {p: RingMatrix.identity(ring, 1) for p in trans}
    elif bundle is not None:
        raise ValueError(f"unknown bundle {bundle!r}")
    name = f"P{n}" + (f"+{bundle}" if bundle else "")
    return GluingData(ring, charts, trans, bmap, name)


def parse_atlas(text: str) -> GluingData:
    """Read an atlas from JSON.

    ``{"nvars": 2, "charts": ["U", "V"],
       "transitions": {"U>V": ["1/b1", "b2/b1"], ...},
       "bundle": {"U>V": [["b1"]], ...}}``
    """
    doc = json.loads(text)
    n = int(doc["nvars"])
    ring = RatFnRing(n)
    charts = tuple(doc["charts"])

    def key(s):
        i, _, j = s.partition(">")
        i, j = i.strip(), j.strip()
        if i not in charts or j not in charts:
            raise IncompatibleGluing(f"unknown chart in {s!r}")
        return i, j

    def comps(v):
        if isinstance(v, str):
            return parse_list(v, ring)
        return [parse_expr(str(c), ring) for c in v]

    trans = {key(s): CoordChange(comps(v)) for s, v in doc["transitions"].items()}
    bmap = None
    if doc.get("bundle"):
        bmap = {key(s): RingMatrix(ring, [[parse_expr(str(c), ring) for c in row] for row in v]) for s, v in doc["bundle"].items()}
    return GluingData(ring, charts, trans, bmap, doc.get("name", "atlas"))


def load_atlas(path) -> GluingData:
    return parse_atlas(Path(path).read_text())


# ---------------------------------------------------------------------------
# discrepancies
# ---------------------------------------------------------------------------


def lift_transitions(data: GluingData) -> dict:
    """``(i, j) -> (g_ij, h_particular(g_ij))``."""
    return {p: LiftedAut(g, h_particular(g)) for p, g in data.transitions.items()}


def _lift(data, lifts, i, j):
    if i == j:
        return LiftedAut.unit(data.ring)
    return lifts[(i, j)]


def discrepancy(data: GluingData, i, j, k, lifts: dict | None = None) -> TensorForm:
    """``c_ijk`` with ``x_ij x_jk = (1, c_ijk) x_ik``, in chart ``i`` coordinates."""
    lifts = lift_transitions(data) if lifts is None else lifts
    y = compose_gprime(_lift(data, lifts, i, j), _lift(data, lifts, j, k))
    xik = _lift(data, lifts, i, k)
    if not y.g == xik.g:
        raise IncompatibleGluing(f"g_{i}{j} g_{j}{k} != g_{i}{k}")
    return TensorForm(to_tilde(y) - to_tilde(xik))


def discrepancies(data: GluingData) -> dict:
    lifts = lift_transitions(data)
    return {t: discrepancy(data, *t, lifts=lifts) for t in data.triples()}


def cocycle_consistency(data: GluingData) -> bool:
    """``g_ij^* c_jkl - c_ikl + c_ijl - c_ijk = 0`` on every quadruple overlap."""
    if len(data.charts) < 4:
        return True
    lifts = lift_transitions(data)
    cache = {}

    def c(i, j, k):
        if (i, j, k) not in cache:
            cache[(i, j, k)] = discrepancy(data, i, j, k, lifts)
        return cache[(i, j, k)]

    for i, j, k, l in combinations(data.charts, 4):
        defect = c(j, k, l).pullback(data.transition(i, j)) - c(i, k, l) + c(i, j, l) - c(i, j, k)
        if not defect.is_zero():
            return False
    return True


def swap_relation(data: GluingData, i, j, k) -> bool:
    """``c_ijk + c_ikj = g_ij^* c_jkj``: swapping the last two charts."""
    lifts = lift_transitions(data)
    lhs = discrepancy(data, i, j, k, lifts) + discrepancy(data, i, k, j, lifts)
    rhs = discrepancy(data, j, k, j, lifts).pullback(data.transition(i, j))
    return lhs == rhs


def closed_skew(t: TensorForm) -> bool:
    return t.is_skew() and is_closed(t)


# ---------------------------------------------------------------------------
# with a bundle
# ---------------------------------------------------------------------------


def lift_super_transitions(data: GluingData) -> dict:
    return {p: super_section(g, data.bundle_matrix(*p)) for p, g in data.transitions.items()}


def super_discrepancy(data: GluingData, i, j, k, lifts: dict | None = None) -> TensorForm:
    lifts = lift_super_transitions(data) if lifts is None else lifts

    def lift(p, q):
        if p == q:
            return SuperAut.unit(data.ring, data.bundle_matrix(p, p).rows)
        return lifts[(p, q)]

    y = compose_super(lift(i, j), lift(j, k))
    xik = lift(i, k)
    if not (y.g == xik.g and y.A == xik.A):
        raise IncompatibleGluing("bundle datum does not compose around the triple")
    return TensorForm((y.h - xik.h) @ xik.g.jacobian.T)


def super_discrepancies(data: GluingData) -> dict:
    lifts = lift_super_transitions(data)
    return {t: super_discrepancy(data, *t, lifts=lifts) for t in data.triples()}
