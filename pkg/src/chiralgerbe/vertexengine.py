"""The free beta-gamma (and b-c) vertex algebra over a coefficient ring.

Two independent implementations live here.

* :class:`FieldExpr` and :func:`nth_product` form a field-level calculator.
  A field is a sum of free-field normal ordered monomials
  ``:F(b) * d^m a^i * d^m b^k (m >= 1) * fermions:`` and products are
  computed by Wick's theorem.
* :class:`StateVec` and :func:`mode_oracle_nth_product` work on the Fock
  space.  States are polynomials in creation modes with coefficients that
  are functions of ``b_0``; n-th products are computed by the Borcherds
  recursion on the left argument, using only the mode brackets
  ``[a_m, b_k] = delta_{m+k,0}`` and ``{psi_m, phi_k} = delta_{m+k,0}``.

Fields and states correspond through :func:`field_to_state`.
"""

from __future__ import annotations

import math
from collections import defaultdict
from itertools import product as iproduct
from math import comb, factorial

from gmpy2 import mpq

from .diffring import PrecisionLost, RatFnElem, RingError

__all__ = [
    "A",
    "B",
    "PSI",
    "PHI",
    "FieldExpr",
    "OPEResult",
    "FieldClassError",
    "nth_product",
    "ope",
    "translate",
    "virasoro_field",
    "super_virasoro_field",
    "StateVec",
    "mode_oracle_nth_product",
    "basis_states",
    "field_to_state",
    "state_to_field",
    "translate_state",
    "weight",
    "transformed_ope_conditions",
]

A, B, PSI, PHI = 0, 1, 2, 3
_NAMES = {A: "a", B: "b", PSI: "psi", PHI: "phi"}
_FERMIONIC = (PSI, PHI)


class FieldClassError(RingError):
    """Raised for fields or states the engine does not support."""


def _canon(factors) -> tuple[int, tuple]:
    """Sort factors; bosons commute, fermions pick up the permutation sign."""
    bos = sorted(f for f in factors if f[0] not in _FERMIONIC)
    ferm = [f for f in factors if f[0] in _FERMIONIC]
    sign = 1
    for i in range(len(ferm)):
        for j in range(i + 1, len(ferm)):
            if ferm[i] > ferm[j]:
                sign = -sign
            elif ferm[i] == ferm[j]:
                return 0, ()
    return sign, tuple(bos) + tuple(sorted(ferm))


def _nonzero(x) -> bool:
    try:
        return not x.is_zero()
    except PrecisionLost:
        return True


def _keep(ring, terms: dict) -> dict:
    """Drop vanishing coefficients, but keep a series zero that is only
    known to a precision below the ring degree: it still limits sums."""
    top = getattr(ring, "degree", None)
    out = {}
    for k, v in terms.items():
        if _nonzero(v) or (top is not None and v.prec < top):
            out[k] = v
    return out


def _min_prec(terms) -> float:
    return min((v.prec for v in terms.values()), default=math.inf)


def _n_fermions(key) -> int:
    return sum(1 for f in key if f[0] in _FERMIONIC)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


class FieldExpr:
    """Linear combination of free-field normal ordered monomials.

    ``terms`` maps a canonical factor tuple to its coefficient ``F(b)``.
    Factors are ``(kind, index, m)`` meaning ``d^m x^index``; ``b`` factors
    always have ``m >= 1`` since undifferentiated ``b`` is part of ``F``.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms: dict | None = None):
        self.ring = ring
        self.terms = _keep(ring, terms or {})

    @property
    def prec(self):
        return _min_prec(self.terms)

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, ring) -> "FieldExpr":
        return cls(ring)

    @classmethod
    def function(cls, F) -> "FieldExpr":
        return cls(F.ring, {(): F})

    @classmethod
    def one(cls, ring) -> "FieldExpr":
        return cls(ring, {(): ring.one})

    @classmethod
    def monomial(cls, ring, factors, coef=None) -> "FieldExpr":
        for kind, i, m in factors:
            if kind == B and m < 1:
                raise FieldClassError("undifferentiated b belongs to the coefficient")
            if not 0 <= i < ring.nvars and kind in (A, B):
                raise FieldClassError(f"index {i} out of range")
        sign, key = _canon(list(factors))
        coef = ring.one if coef is None else ring.coerce(coef)
        if sign == 0:
            return cls(ring)
        return cls(ring, {key: coef if sign > 0 else -coef})

    @classmethod
    def a(cls, ring, i: int, m: int = 0) -> "FieldExpr":
        return cls.monomial(ring, [(A, i, m)])

    @classmethod
    def b(cls, ring, i: int, m: int = 0) -> "FieldExpr":
        if m == 0:
            return cls.function(ring.var(i))
        return cls.monomial(ring, [(B, i, m)])

    @classmethod
    def psi(cls, ring, i: int, m: int = 0) -> "FieldExpr":
        return cls.monomial(ring, [(PSI, i, m)])

    @classmethod
    def phi(cls, ring, i: int, m: int = 0) -> "FieldExpr":
        return cls.monomial(ring, [(PHI, i, m)])

    # algebra ------------------------------------------------------------
    def _merge(self, other, sign=1):
        out = dict(self.terms)
        for k, v in other.terms.items():
            if k in out:
                out[k] = out[k] + v if sign > 0 else out[k] - v
            else:
                out[k] = v if sign > 0 else -v
        return FieldExpr(self.ring, out)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def __neg__(self):
        return FieldExpr(self.ring, {k: -v for k, v in self.terms.items()})

    def scale(self, c) -> "FieldExpr":
        """Multiply every coefficient by the function or constant ``c``."""
        return FieldExpr(self.ring, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "FieldExpr") -> "FieldExpr":
        """Free-field normal ordered product ``:self other:`` (no contractions)."""
        if not isinstance(other, FieldExpr):
            return self.scale(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                sign, key = _canon(list(k1) + list(k2))
                if sign == 0:
                    continue
                v = v1 * v2
                if sign < 0:
                    v = -v
                out[key] = out[key] + v if key in out else v
        return FieldExpr(self.ring, out)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.terms.values())

    def support(self) -> list:
        """Monomials whose coefficient is not known to vanish."""
        return [k for k, v in self.terms.items() if _nonzero(v)]

    def __eq__(self, other):
        if not isinstance(other, FieldExpr):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def coefficient(self, factors=()) -> object:
        """Coefficient function of the monomial with the given factors."""
        sign, key = _canon(list(factors))
        v = self.terms.get(key, self.ring.zero)
        return v if sign >= 0 else -v

    def max_a_degree(self) -> int:
        return max((sum(1 for f in k if f[0] == A) for k in self.support()), default=0)

    def __iter__(self):
        return iter(self.terms.items())

    def __repr__(self):
        return f"FieldExpr({self})"

    def __str__(self):
        keys = sorted(self.support())
        if not keys:
            return "0"
        parts = []
        for key in keys:
            coef = str(self.terms[key])
            facs = [_factor_str(f) for f in key]
            if not facs:
                parts.append(f":{coef}:")
            elif coef == "1":
                parts.append(":" + " * ".join(facs) + ":")
            else:
                parts.append(f":({coef})*" + " * ".join(facs) + ":")
        return " + ".join(parts)


def _factor_str(f) -> str:
    kind, i, m = f
    return f"{_NAMES[kind]}{i + 1}" + ("'" * m if m <= 3 else f"^({m})")


def weight(key) -> int:
    """Conformal weight of a field monomial."""
    w = 0
    for kind, _, m in key:
        w += m + (1 if kind in (A, PSI) else 0)
    return w


def translate(f: FieldExpr) -> FieldExpr:
    """The derivative field ``T f``."""
    ring = f.ring
    out: dict = defaultdict(lambda: ring.zero)
    for key, F in f.terms.items():
        for k in range(ring.nvars):
            sign, nk = _canon(list(key) + [(B, k, 1)])
            out[nk] = out[nk] + F.partial(k)
        for p, (kind, i, m) in enumerate(key):
            lst = list(key)
            lst[p] = (kind, i, m + 1)
            sign, nk = _canon(lst)
            if sign == 0:
                continue
            out[nk] = out[nk] + (F if sign > 0 else -F)
    return FieldExpr(ring, dict(out))


def _translate_power(f: FieldExpr, k: int) -> FieldExpr:
    for _ in range(k):
        f = translate(f)
    return f


# ---------------------------------------------------------------------------
# Wick theorem
# ---------------------------------------------------------------------------


def _prop(m: int, n: int) -> tuple[int, int]:
    """``d_z^m d_w^n (z-w)^{-1} = c / (z-w)^{order}``."""
    return (-1) ** m * factorial(m + n), m + n + 1


def _contractions(X, Y):
    """Enumerate Wick contraction patterns between ``:X F:(z)`` and ``:Y G:(w)``.

    Yields ``(scalar, order, dF, dG, used_x, used_y, fermion_pairs)`` where
    ``dF`` / ``dG`` list the derivative indices hitting the coefficient
    functions and ``fermion_pairs`` lists contracted fermion positions.
    """
    xa = [p for p, f in enumerate(X) if f[0] == A]
    ya = [q for q, f in enumerate(Y) if f[0] == A]
    xf = [p for p, f in enumerate(X) if f[0] in _FERMIONIC]
    yf = [q for q, f in enumerate(Y) if f[0] in _FERMIONIC]

    # options for each a at z: None, "G", or a b-factor at w
    def a_options(a_f, other, other_kind):
        opts = [None, "fn"]
        for q, f in enumerate(other):
            if f[0] == other_kind and f[1] == a_f[1]:
                opts.append(q)
        return opts

    x_opts = [a_options(X[p], Y, B) for p in xa]
    y_opts = [a_options(Y[q], X, B) for q in ya]

    ferm_matchings = list(_fermion_matchings(X, Y, xf, yf))

    for xc in iproduct(*x_opts):
        used_yb = [c for c in xc if isinstance(c, int)]
        if len(used_yb) != len(set(used_yb)):
            continue
        for yc in iproduct(*y_opts):
            used_xb = [c for c in yc if isinstance(c, int)]
            if len(used_xb) != len(set(used_xb)):
                continue
            scalar = 1
            order = 0
            dF: list[int] = []
            dG: list[int] = []
            used_x = set(used_xb)
            used_y = set(used_yb)
            for p, c in zip(xa, xc):
                if c is None:
                    continue
                used_x.add(p)
                m = X[p][2]
                if c == "fn":
                    s, o = _prop(m, 0)
                    dG.append(X[p][1])
                else:
                    s, o = _prop(m, Y[c][2])
                scalar *= s
                order += o
            for q, c in zip(ya, yc):
                if c is None:
                    continue
                used_y.add(q)
                n = Y[q][2]
                if c == "fn":
                    s, o = _prop(0, n)
                    dF.append(Y[q][1])
                else:
                    s, o = _prop(X[c][2], n)
                scalar *= -s
                order += o
            for fm in ferm_matchings:
                s2, o2 = 1, 0
                ux, uy = set(used_x), set(used_y)
                for p, q in fm:
                    s, o = _prop(X[p][2], Y[q][2])
                    s2 *= s
                    o2 += o
                    ux.add(p)
                    uy.add(q)
                yield scalar * s2, order + o2, dF, dG, ux, uy, fm


def _fermion_matchings(X, Y, xf, yf):
    """All partial matchings pairing psi^i with phi^i across the two sides."""

    def rec(k, avail):
        if k == len(xf):
            yield []
            return
        yield from rec(k + 1, avail)
        p = xf[k]
        kind, i, _ = X[p]
        want = PHI if kind == PSI else PSI
        for q in avail:
            if Y[q][0] == want and Y[q][1] == i:
                rest = [r for r in avail if r != q]
                for tail in rec(k + 1, rest):
                    yield [(p, q)] + tail

    yield from rec(0, list(yf))


def _fermion_sign(X, Y, pairs) -> int:
    """Sign from bringing each contracted (z, w) fermion pair together."""
    if not pairs:
        return 1
    seq = [("x", p) for p, f in enumerate(X) if f[0] in _FERMIONIC]
    seq += [("y", q) for q, f in enumerate(Y) if f[0] in _FERMIONIC]
    sign = 1
    for p, q in pairs:
        i = seq.index(("x", p))
        j = seq.index(("y", q))
        if (j - i - 1) % 2:
            sign = -sign
        del seq[j]
        del seq[i]
    return sign


def _deriv(F, idx):
    for i in idx:
        F = F.partial(i)
    return F


def _top(ring):
    top = getattr(ring, "degree", None)
    return math.inf if top is None else top


def _monomial_nth(X, F, Y, G, n: int, ring) -> FieldExpr:
    out = FieldExpr(ring)
    for scalar, order, dF, dG, ux, uy, fpairs in _contractions(X, Y):
        k = order - n - 1
        if k < 0:
            continue
        Fd = _deriv(F, dF)
        Gd = _deriv(G, dG)
        if not (_nonzero(Fd) and _nonzero(Gd)) and min(Fd.prec, Gd.prec) >= _top(ring):
            continue
        sign = _fermion_sign(X, Y, fpairs)
        left = FieldExpr(ring, {tuple(f for p, f in enumerate(X) if p not in ux): Fd})
        right = FieldExpr(ring, {tuple(f for q, f in enumerate(Y) if q not in uy): Gd})
        left = _translate_power(left, k)
        c = mpq(scalar * sign, factorial(k))
        out = out + (left * right).scale(c)
    return out


def nth_product(f: FieldExpr, g: FieldExpr, n: int) -> FieldExpr:
    """``f_(n) g`` for any integer ``n >= -1`` (and below), by Wick's theorem."""
    if f.ring != g.ring:
        raise FieldClassError("fields over different rings")
    out = FieldExpr(f.ring)
    for X, F in f.terms.items():
        for Y, G in g.terms.items():
            out = out + _monomial_nth(X, F, Y, G, n, f.ring)
    return out


class OPEResult:
    """Singular part of an OPE: ``{r: coefficient of (z-w)^{-r}}``."""

    def __init__(self, poles: dict):
        self.poles = {r: v for r, v in poles.items() if not v.is_zero()}

    def __getitem__(self, r):
        return self.poles[r]

    def get(self, r, ring):
        return self.poles.get(r, FieldExpr(ring))

    def is_regular(self) -> bool:
        return not self.poles

    def max_order(self) -> int:
        return max(self.poles, default=0)

    def __repr__(self):
        return "OPEResult({" + ", ".join(f"{r}: {v}" for r, v in sorted(self.poles.items())) + "})"


def ope(f: FieldExpr, g: FieldExpr) -> OPEResult:
    """All singular terms of ``f(z) g(w)``."""
    top = 0
    for X in f.terms:
        for Y in g.terms:
            top = max(top, max((o for _, o, *_ in _contractions(X, Y)), default=0))
    return OPEResult({n + 1: nth_product(f, g, n) for n in range(top)})


def virasoro_field(ring) -> FieldExpr:
    """``sum_i :a^i db^i:``."""
    out = FieldExpr(ring)
    for i in range(ring.nvars):
        out = out + FieldExpr.monomial(ring, [(A, i, 0), (B, i, 1)])
    return out


def super_virasoro_field(ring, m: int) -> FieldExpr:
    """``sum_i :a^i db^i: + sum_j :dphi^j psi^j:`` with ``m`` fermion pairs."""
    out = virasoro_field(ring)
    for j in range(m):
        out = out + FieldExpr.monomial(ring, [(PHI, j, 1), (PSI, j, 0)])
    return out


# ---------------------------------------------------------------------------
# Fock space oracle
# ---------------------------------------------------------------------------


class StateVec:
    """Finite combination of creation-mode monomials times functions of ``b_0``.

    Modes are ``(kind, index, depth)``: ``a_{-n}, b_{-n}, psi_{-n}`` with
    ``n >= 1`` and ``phi_{-n}`` with ``n >= 0``.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms: dict | None = None):
        self.ring = ring
        self.terms = _keep(ring, terms or {})

    @property
    def prec(self):
        return _min_prec(self.terms)

    @classmethod
    def vacuum(cls, ring, coef=None) -> "StateVec":
        return cls(ring, {(): ring.one if coef is None else ring.coerce(coef)})

    @classmethod
    def monomial(cls, ring, modes, coef=None) -> "StateVec":
        for kind, _, n in modes:
            if n < (0 if kind == PHI else 1):
                raise FieldClassError("not a creation mode")
        sign, key = _canon(list(modes))
        coef = ring.one if coef is None else ring.coerce(coef)
        if sign == 0:
            return cls(ring)
        return cls(ring, {key: coef if sign > 0 else -coef})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return StateVec(self.ring, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return StateVec(self.ring, {k: -v for k, v in self.terms.items()})

    def scale(self, c) -> "StateVec":
        return StateVec(self.ring, {k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.terms.values())

    def __eq__(self, other):
        if not isinstance(other, StateVec):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def weights(self) -> set[int]:
        return {_state_weight(k) for k in self.terms}

    def support(self) -> list:
        return [k for k, v in self.terms.items() if _nonzero(v)]

    def __repr__(self):
        keys = sorted(self.support())
        if not keys:
            return "StateVec(0)"
        parts = []
        for key in keys:
            modes = " ".join(f"{_NAMES[k]}{i + 1}[-{n}]" for k, i, n in key)
            parts.append(f"({self.terms[key]}) {modes}|0>".replace(" |0>", "|0>"))
        return "StateVec(" + " + ".join(parts) + ")"


def _state_weight(key) -> int:
    return sum(n for _, _, n in key)


def _apply_mode(kind: int, i: int, k: int, v: StateVec) -> StateVec:
    """Apply the field mode ``x_(k)`` of the generator ``x = kind^i``."""
    ring = v.ring
    n = k + 1 if kind in (B, PHI) else k  # ordinary mode index
    out: dict = {}

    def put(key, coef, sign=1):
        if sign == 0:
            return
        if sign < 0:
            coef = -coef
        out[key] = out[key] + coef if key in out else coef

    creation = n < 0 or (kind == PHI and n == 0)
    for key, F in v.terms.items():
        if creation:
            sign, nk = _canon([(kind, i, -n)] + list(key))
            put(nk, F, sign)
        elif kind == A and n == 0:
            put(key, F.partial(i))
        elif kind == B and n == 0:
            put(key, F * ring.var(i))
        elif kind in (A, B):
            target = (B if kind == A else A, i, n)
            c = key.count(target)
            if c:
                lst = list(key)
                lst.remove(target)
                put(tuple(lst), F * c if kind == A else F * (-c))
        else:
            target = (PHI if kind == PSI else PSI, i, n)
            if target in key:
                p = key.index(target)
                before = sum(1 for f in key[:p] if f[0] in _FERMIONIC)
                put(key[:p] + key[p + 1 :], F, -1 if before % 2 else 1)
    return StateVec(ring, out)


def _mode_of(f) -> tuple[int, int, int]:
    """Creation mode -> (kind, index, m) with the mode equal to ``x_(-1-m)``."""
    kind, i, n = f
    return kind, i, (n - 1 if kind in (A, PSI) else n)


def _gen_weight(kind) -> int:
    return 1 if kind in (A, PSI) else 0


def _split_poly(F):
    """``F = c + sum_i b^i F_i`` for a polynomial coefficient."""
    ring = F.ring
    if ring.kind != "series":
        return _split_poly_rat(F)
    parts = [dict() for _ in range(ring.nvars)]
    const = mpq(0)
    for mono, c in F.coeffs.items():
        nz = next((i for i, e in enumerate(mono) if e), None)
        if nz is None:
            const = c
            continue
        lst = list(mono)
        lst[nz] -= 1
        parts[nz][tuple(lst)] = c
    prec = max(F.prec - 1, 0)
    return const, [ring.elem(p, prec) if p else None for p in parts]


def _split_poly_rat(F):
    ring = F.ring
    if not F.den.is_ground:
        raise FieldClassError("the mode oracle needs polynomial coefficients")
    num = F.num.quo_ground(F.den.LC)
    parts = [dict() for _ in range(ring.nvars)]
    const = mpq(0)
    for mono, c in num.terms():
        nz = next((i for i, e in enumerate(mono) if e), None)
        if nz is None:
            const = mpq(int(c.numerator), int(c.denominator))
            continue
        lst = list(mono)
        lst[nz] -= 1
        parts[nz][tuple(lst)] = c
    pr = ring.poly_ring
    return const, [RatFnElem(ring, pr.from_dict(p), pr.one, _reduced=True) if p else None for p in parts]


def _state_max_weight(v: StateVec) -> int:
    return max((_state_weight(k) for k in v.terms), default=-1)


def _coef_sig(F):
    if isinstance(F, RatFnElem):
        return (F.num, F.den)
    return (F.prec, tuple(sorted(F.coeffs.items())))


def _state_sig(v: StateVec):
    return tuple(sorted((k, _coef_sig(c)) for k, c in v.terms.items()))


def _nprod_monomial(key, F, v: StateVec, n: int, memo=None) -> StateVec:
    if memo is not None:
        sig = (key, _coef_sig(F), _state_sig(v), n)
        hit = memo.get(sig)
        if hit is None:
            hit = memo[sig] = _nprod_monomial_raw(key, F, v, n, memo)
        return hit
    return _nprod_monomial_raw(key, F, v, n, None)


def _nprod_monomial_raw(key, F, v, n, memo):
    ring = v.ring
    wv = _state_max_weight(v)
    if wv < 0:
        return StateVec(ring)
    if not key:
        const, parts = _split_poly(F)
        out = v.scale(const) if (n == -1 and const) else StateVec(ring)
        for i, Fi in enumerate(parts):
            if Fi is not None:
                out = out + _borcherds(B, i, 0, (), Fi, v, n, memo)
        return out
    kind, i, m = _mode_of(key[0])
    return _borcherds(kind, i, m, key[1:], F, v, n, memo)


def _borcherds(kind, i, m, rest, F, v: StateVec, n: int, memo=None) -> StateVec:
    """``(x_(-1-m) u)_(n) v`` with ``u = rest * F |0>``."""
    ring = v.ring
    p = -1 - m
    wu = _state_weight(rest)
    wv = _state_max_weight(v)
    wx = _gen_weight(kind)
    eps = -1 if (kind in _FERMIONIC and _n_fermions(rest) % 2) else 1
    out = StateVec(ring)
    j = 0
    while n + j <= wu + wv - 1:
        inner = _nprod_monomial(rest, F, v, n + j, memo)
        if inner.terms:
            out = out + _apply_mode(kind, i, p - j, inner).scale(comb(m + j, j))

        j += 1
    for j in range(0, wx + wv):
        xv = _apply_mode(kind, i, j, v)
        if not xv.terms:
            continue
        inner = _nprod_monomial(rest, F, xv, p + n - j, memo)
        out = out + inner.scale(comb(m + j, j) * (-1) ** m * eps)
    return out


def mode_oracle_nth_product(u: StateVec, v: StateVec, n: int, wt_cutoff: int = 8, memo: dict | None = None) -> StateVec:
    """``u_(n) v`` computed purely with mode operators.

    ``memo`` may be shared between calls on the same pair of states.
    """
    if u.ring != v.ring:
        raise FieldClassError("states over different rings")
    wmax = max(_state_max_weight(u), _state_max_weight(v))
    if wmax > wt_cutoff or abs(n) > wt_cutoff:
        raise FieldClassError("weight cutoff exceeded")
    out = StateVec(v.ring)
    for key, F in u.terms.items():
        out = out + _nprod_monomial(key, F, v, n, memo)
    return out


def basis_states(ring, max_weight: int, kinds=(A, B)) -> list:
    """Creation monomials of weight ``<= max_weight`` (unit coefficient)."""
    n = ring.nvars
    modes = []
    for kind in kinds:
        lo = 0 if kind == PHI else 1
        modes += [(kind, i, d) for i in range(n) for d in range(lo, max_weight + 1)]
    modes.sort()
    out = []

    def grow(start, chosen, w):
        sv = StateVec.monomial(ring, chosen)
        if sv.terms:
            out.append(sv)
        for idx in range(start, len(modes)):
            kind, i, d = modes[idx]
            if w + d > max_weight:
                continue
            # fermionic modes may not repeat
            nxt = idx + 1 if kind in _FERMIONIC else idx
            grow(nxt, chosen + [modes[idx]], w + d)

    grow(0, [], 0)
    return out


def field_to_state(f: FieldExpr) -> StateVec:
    """``Y(s, z) = f`` determines ``s = f_(-1)|0>``."""
    out: dict = {}
    for key, F in f.terms.items():
        modes = []
        c = 1
        for kind, i, m in key:
            modes.append((kind, i, m + 1 if kind in (A, PSI) else m))
            c *= factorial(m)
        out[tuple(modes)] = F * c
    return StateVec(f.ring, out)


def state_to_field(s: StateVec) -> FieldExpr:
    out: dict = {}
    for key, F in s.terms.items():
        facs = []
        c = 1
        for kind, i, n in key:
            m = n - 1 if kind in (A, PSI) else n
            facs.append((kind, i, m))
            c *= factorial(m)
        out[tuple(facs)] = F * mpq(1, c)
    return FieldExpr(s.ring, out)


def translate_state(s: StateVec) -> StateVec:
    """``T = L_{-1}`` on states.

    ``T a_{-n} = n a_{-n-1}``, ``T b_{-n} = (n+1) b_{-n-1}`` (likewise for
    ``psi`` and ``phi``) and ``T F(b_0) = d_k F b^k_{-1}``.
    """
    ring = s.ring
    out: dict = {}

    def put(key, coef, sign=1):
        if sign == 0:
            return
        coef = coef if sign > 0 else -coef
        out[key] = out[key] + coef if key in out else coef

    for key, F in s.terms.items():
        for k in range(ring.nvars):
            sign, nk = _canon(list(key) + [(B, k, 1)])
            put(nk, F.partial(k), sign)
        for p, (kind, i, n) in enumerate(key):
            lst = list(key)
            lst[p] = (kind, i, n + 1)
            sign, nk = _canon(lst)
            put(nk, F * (n if kind in (A, PSI) else n + 1), sign)
    return StateVec(ring, out)


# ---------------------------------------------------------------------------
# automorphism criterion through OPEs
# ---------------------------------------------------------------------------


def transformed_ope_conditions(x):
    """OPE residuals of the transformed generators of a lifted automorphism.

    Returns ``(order2, order1, extra_ok)``: ``order2[i][j]`` is the
    coefficient of ``(z-w)^{-2}`` in ``a~^i(z) a~^j(w)``;
    ``order1[i][j][s]`` is the coefficient of ``db^s`` in the simple pole;
    ``extra_ok`` reports that no other terms occur, that
    ``a~^i(z) b~^j(w) ~ delta_ij/(z-w)`` and that ``b~ b~`` is regular.
    """
    from .cdoaut import apply_aut

    ring = x.g.ring
    n = ring.nvars
    at = [apply_aut(x, ("a", i)) for i in range(n)]
    bt = [apply_aut(x, ("b", i)) for i in range(n)]
    order2 = []
    order1 = []
    extra_ok = True
    for i in range(n):
        r2, r1 = [], []
        for j in range(n):
            res = ope(at[i], at[j])
            if res.max_order() > 2:
                extra_ok = False
            p2 = res.get(2, ring)
            p1 = res.get(1, ring)
            if any(k != () for k in p2.support()):
                extra_ok = False
            r2.append(p2.coefficient(()))
            r1.append([p1.coefficient([(B, s, 1)]) for s in range(n)])
            known = {((B, s, 1),) for s in range(n)}
            if any(k not in known for k in p1.support()):
                extra_ok = False
            ab = ope(at[i], bt[j])
            expect = FieldExpr.one(ring) if i == j else FieldExpr(ring)
            if set(ab.poles) - {1} or not (ab.get(1, ring) == expect):
                extra_ok = False
            if not ope(bt[i], bt[j]).is_regular():
                extra_ok = False
        order2.append(r2)
        order1.append(r1)
    return order2, order1, extra_ok
