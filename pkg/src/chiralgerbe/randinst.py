"""Seeded random instances: coordinate changes, matrices, skew and closed 2-forms."""

from __future__ import annotations

import random
from itertools import product

from gmpy2 import mpq

from .coordgroup import CoordChange
from .ringmat import RingMatrix, TensorForm

_NUMS = (-2, -1, 1, 2, 3)
_DENS = (1, 2, 3)


def small_rational(rng: random.Random) -> mpq:
    return mpq(rng.choice(_NUMS), rng.choice(_DENS))


def _monomials(nvars, lo, hi):
    for exps in product(range(hi + 1), repeat=nvars):
        if lo <= sum(exps) <= hi:
            yield exps


def _degree_cap(ring, degree):
    if degree is not None:
        return degree
    return getattr(ring, "degree", None) or 3


def random_poly(ring, rng: random.Random, lo: int = 0, hi: int | None = None, density: float = 0.6):
    """Polynomial with monomials of total degree in ``[lo, hi]``."""
    hi = _degree_cap(ring, hi)
    gens = ring.gens
    acc = ring.zero
    for exps in _monomials(ring.nvars, lo, hi):
        if rng.random() < density:
            term = ring.const(small_rational(rng))
            for v, e in zip(gens, exps):
                if e:
                    term = term * v**e
            acc = acc + term
    return acc


def random_coord_change(ring, rng: random.Random, degree: int | None = None) -> CoordChange:
    """Origin-preserving polynomial ``g`` with unit-determinant linear part.

    The linear part is the identity plus a strictly lower-triangular
    perturbation; higher terms have degree at most ``degree`` (default
    ``D - 1`` in series mode, 3 in rational mode).
    """
    n = ring.nvars
    if degree is None:
        d = getattr(ring, "degree", None)
        degree = max(d - 1, 2) if d else 3
    top = degree
    gens = ring.gens
    comps = []
    for i in range(n):
        c = gens[i]
        for j in range(i):
            if rng.random() < 0.5:
                c = c + gens[j] * small_rational(rng)
        c = c + random_poly(ring, rng, 2, top)
        comps.append(c)
    return CoordChange(comps)


def random_matrix(ring, rng: random.Random, rows: int | None = None, cols: int | None = None, degree: int | None = None):
    rows = ring.nvars if rows is None else rows
    cols = rows if cols is None else cols
    hi = _degree_cap(ring, degree)
    return RingMatrix.from_fn(ring, rows, cols, lambda i, j: random_poly(ring, rng, 0, hi))


def random_invertible_matrix(ring, rng: random.Random, size: int, degree: int | None = None) -> RingMatrix:
    """Identity plus a random perturbation whose constant part is strictly lower-triangular."""
    hi = _degree_cap(ring, degree)

    def entry(i, j):
        lo = 0 if i > j else 1
        base = ring.one if i == j else ring.zero
        return base + random_poly(ring, rng, lo, hi)

    return RingMatrix.from_fn(ring, size, size, entry)


def random_skew(ring, rng: random.Random, degree: int | None = None) -> RingMatrix:
    m = random_matrix(ring, rng, degree=degree)
    return m - m.T


def random_closed_skew(ring, rng: random.Random, degree: int | None = None) -> RingMatrix:
    """``d`` of a random 1-form: ``k^{ij} = d_i w^j - d_j w^i``."""
    hi = _degree_cap(ring, degree)
    w = [random_poly(ring, rng, 0, hi) for _ in range(ring.nvars)]
    n = ring.nvars
    return RingMatrix.from_fn(ring, n, n, lambda i, j: w[j].partial(i) - w[i].partial(j))


def random_symmetric(ring, rng: random.Random, degree: int | None = None) -> RingMatrix:
    m = random_matrix(ring, rng, degree=degree)
    return m + m.T


def as_form(m: RingMatrix) -> TensorForm:
    return TensorForm(m)
