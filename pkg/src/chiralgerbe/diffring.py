"""Exact differential coefficient rings.

Two families of rings carry the coefficient functions ``F(b)`` used
everywhere else in the package:

* :class:`SeriesRing` -- multivariate power series over Q truncated at total
  degree ``D``.  Every element records the degree ``prec`` up to which its
  coefficients are trusted; derivatives and compositions lower it, and
  zero tests refuse to answer once nothing is trusted.
* :class:`RatFnRing` -- multivariate rational functions over Q, exact.
  Numerator and denominator are sympy sparse polynomials and are cancelled
  after every operation.

Elements of both kinds share one interface (``+ - * /``, ``partial``,
``substitute``, ``invert``, ``is_zero``) so the modules built on top are
generic over the ring.  Variables are indexed from 0 in the Python API and
printed as ``b1, b2, ...``.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from itertools import combinations_with_replacement
from numbers import Rational
from typing import Iterable, Sequence

from gmpy2 import mpq
from sympy.polys.domains import QQ
from sympy.polys.rings import ring as sympy_ring

__all__ = [
    "RingError",
    "IncompatibleOperands",
    "NotAUnit",
    "PrecisionLost",
    "SubstitutionError",
    "SeriesRing",
    "SeriesElem",
    "RatFnRing",
    "RatFnElem",
    "add",
    "mul",
    "partial",
    "substitute",
    "invert_unit",
    "Substituter",
    "to_series",
]


class RingError(ValueError):
    pass


class IncompatibleOperands(RingError):
    pass


class NotAUnit(RingError, ZeroDivisionError):
    pass


class PrecisionLost(RingError):
    """Raised when a question is asked about a series with no trusted terms."""


class SubstitutionError(RingError):
    pass


def _q(c) -> mpq:
    if isinstance(c, mpq):
        return c
    if isinstance(c, (int, Fraction)) or isinstance(c, Rational):
        return mpq(c.numerator, c.denominator) if not isinstance(c, int) else mpq(c)
    raise TypeError(f"not an exact rational: {c!r}")


def _monomials_upto(nvars: int, degree: int):
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield tuple(e)


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------


class SeriesRing:
    """Power series in ``nvars`` variables truncated above total degree ``degree``."""

    kind = "series"

    def __init__(self, nvars: int, degree: int):
        if nvars < 1 or degree < 0:
            raise ValueError("need nvars >= 1 and degree >= 0")
        self.nvars = nvars
        self.degree = degree
        self._zero_mono = (0,) * nvars

    def __eq__(self, other):
        return (
            isinstance(other, SeriesRing)
            and other.nvars == self.nvars
            and other.degree == self.degree
        )

    def __hash__(self):
        return hash(("series", self.nvars, self.degree))

    def __repr__(self):
        return f"SeriesRing(nvars={self.nvars}, degree={self.degree})"

    def elem(self, coeffs: dict, prec: int | None = None) -> "SeriesElem":
        return SeriesElem(self, coeffs, self.degree if prec is None else prec)

    def const(self, c) -> "SeriesElem":
        c = _q(c)
        return SeriesElem(self, {self._zero_mono: c} if c else {}, self.degree, _checked=True)

    @property
    def zero(self) -> "SeriesElem":
        return self.const(0)

    @property
    def one(self) -> "SeriesElem":
        return self.const(1)

    def var(self, i: int) -> "SeriesElem":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        e = [0] * self.nvars
        e[i] = 1
        return SeriesElem(self, {tuple(e): mpq(1)}, self.degree)

    @property
    def gens(self) -> tuple["SeriesElem", ...]:
        return tuple(self.var(i) for i in range(self.nvars))

    def coerce(self, x) -> "SeriesElem":
        if isinstance(x, SeriesElem):
            if x.ring != self:
                raise IncompatibleOperands(f"{x.ring} vs {self}")
            return x
        if isinstance(x, (RatFnElem,)):
            return x.to_series(self)
        return self.const(x)

    def parse(self, text: str) -> "SeriesElem":
        return parse_expr(text, self)

    def monomials(self, degree: int | None = None):
        return _monomials_upto(self.nvars, self.degree if degree is None else degree)


class SeriesElem:
    """Truncated power series with exact rational coefficients.

    ``coeffs`` maps exponent tuples to nonzero ``mpq`` values, all of total
    degree ``<= prec``.  ``prec`` may be negative, meaning nothing is known.
    """

    __slots__ = ("ring", "prec", "coeffs", "_sorted")

    def __init__(self, ring: SeriesRing, coeffs: dict, prec: int, _checked=False):
        prec = min(prec, ring.degree)
        if not _checked:
            clean = {}
            for m, c in coeffs.items():
                m = tuple(m)
                if len(m) != ring.nvars or min(m, default=0) < 0:
                    raise ValueError(f"bad exponent {m} for {ring}")
                if sum(m) > prec:
                    continue
                c = _q(c)
                if c:
                    clean[m] = c
            coeffs = clean
        self.ring = ring
        self.prec = prec
        self.coeffs = coeffs
        self._sorted = None

    # -- structure ---------------------------------------------------------

    def _by_degree(self):
        if self._sorted is None:
            self._sorted = sorted(
                ((sum(m), m, c) for m, c in self.coeffs.items()), key=lambda t: t[0]
            )
        return self._sorted

    @property
    def valuation(self) -> int:
        """Lowest degree with a nonzero coefficient (``prec + 1`` if none)."""
        items = self._by_degree()
        return items[0][0] if items else self.prec + 1

    def constant_term(self) -> mpq:
        return self.coeff(self.ring._zero_mono)

    def coeff(self, mono) -> mpq:
        mono = tuple(mono)
        if sum(mono) > self.prec:
            raise PrecisionLost(f"coefficient of {mono} is beyond the known precision {self.prec}")
        return self.coeffs.get(mono, mpq(0))

    def is_unit(self) -> bool:
        return self.prec >= 0 and self.constant_term() != 0

    def is_zero(self) -> bool:
        if self.prec < 0:
            raise PrecisionLost("series carries no trusted coefficients")
        return not self.coeffs

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.coeffs)

    def truncate(self, prec: int) -> "SeriesElem":
        if prec >= self.prec:
            return self
        return SeriesElem(
            self.ring, {m: c for m, c in self.coeffs.items() if sum(m) <= prec}, prec, _checked=True
        )

    # -- arithmetic --------------------------------------------------------

    def _other(self, y) -> "SeriesElem":
        if isinstance(y, SeriesElem):
            if y.ring != self.ring:
                raise IncompatibleOperands(f"{self.ring} vs {y.ring}")
            return y
        if isinstance(y, RatFnElem):
            raise IncompatibleOperands("cannot mix series and rational-function elements")
        return self.ring.const(y)

    def __add__(self, y):
        y = self._other(y)
        prec = min(self.prec, y.prec)
        out = {m: c for m, c in self.coeffs.items() if sum(m) <= prec}
        for m, c in y.coeffs.items():
            if sum(m) > prec:
                continue
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return SeriesElem(self.ring, out, prec, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        return SeriesElem(self.ring, {m: -c for m, c in self.coeffs.items()}, self.prec, _checked=True)

    def __sub__(self, y):
        return self + (-self._other(y))

    def __rsub__(self, y):
        return self._other(y) - self

    def _scale(self, c):
        c = _q(c)
        if not c:
            return SeriesElem(self.ring, {}, self.prec, _checked=True)
        return SeriesElem(self.ring, {m: v * c for m, v in self.coeffs.items()}, self.prec, _checked=True)

    def __mul__(self, y):
        if not isinstance(y, (SeriesElem, RatFnElem)):
            return self._scale(y)
        y = self._other(y)
        prec = min(self.prec + y.valuation, y.prec + self.valuation, self.ring.degree)
        return SeriesElem(self.ring, _mul_sorted(self._by_degree(), y._by_degree(), prec), prec, _checked=True)

    __rmul__ = __mul__

    def __truediv__(self, y):
        if not isinstance(y, (SeriesElem, RatFnElem)):
            y = _q(y)
            if not y:
                raise NotAUnit("division by zero")
            return self._scale(1 / y)
        return self * self._other(y).invert()

    def __rtruediv__(self, y):
        return self._other(y) * self.invert()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def invert(self) -> "SeriesElem":
        c0 = self.constant_term()
        if self.prec < 0 or not c0:
            raise NotAUnit("series with zero constant term is not invertible")
        inv0 = 1 / c0
        # x = c0 (1 - u) with u of positive valuation
        u = SeriesElem(
            self.ring,
            {m: -c * inv0 for m, c in self.coeffs.items() if sum(m) > 0},
            self.prec,
            _checked=True,
        )
        result = self.ring.one.truncate(self.prec)
        term = result
        for _ in range(self.prec):
            term = term * u
            if not term.coeffs:
                break
            result = result + term
        return SeriesElem(self.ring, {m: c * inv0 for m, c in result.coeffs.items()}, self.prec, _checked=True)

    def partial(self, i: int) -> "SeriesElem":
        if not 0 <= i < self.ring.nvars:
            raise IndexError(f"variable index {i} out of range")
        out = {}
        for m, c in self.coeffs.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * e
        return SeriesElem(self.ring, out, self.prec - 1, _checked=True)

    def substitute(self, gs) -> "SeriesElem":
        return substitute(self, gs)

    # -- comparison and display ---------------------------------------------

    def __eq__(self, y):
        try:
            y = self._other(y)
        except (TypeError, IncompatibleOperands):
            return NotImplemented
        return (self - y).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"SeriesElem({_poly_str(self.coeffs)} + O(deg>{self.prec}))"

    def __str__(self):
        return _poly_str(self.coeffs)


def _mul_sorted(xs, ys, prec):
    out: dict = {}
    if not xs or not ys:
        return out
    ymin = ys[0][0]
    for d1, m1, c1 in xs:
        if d1 + ymin > prec:
            break
        for d2, m2, c2 in ys:
            if d1 + d2 > prec:
                break
            m = tuple([a + b for a, b in zip(m1, m2)])
            v = out.get(m)
            out[m] = c1 * c2 if v is None else v + c1 * c2
    return {m: c for m, c in out.items() if c}


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RatFnRing:
    """Rational functions in ``nvars`` variables over Q."""

    kind = "rational"
    degree = None

    def __init__(self, nvars: int):
        if nvars < 1:
            raise ValueError("need nvars >= 1")
        self.nvars = nvars
        names = ",".join(f"b{i + 1}" for i in range(nvars))
        self.poly_ring, *self._pgens = sympy_ring(names, QQ)
        self._consts = {}

    def __eq__(self, other):
        return isinstance(other, RatFnRing) and other.nvars == self.nvars

    def __hash__(self):
        return hash(("rational", self.nvars))

    def __repr__(self):
        return f"RatFnRing(nvars={self.nvars})"

    def frac(self, num, den=None) -> "RatFnElem":
        num = self.poly_ring(num)
        den = self.poly_ring.one if den is None else self.poly_ring(den)
        return RatFnElem(self, num, den)

    def const(self, c) -> "RatFnElem":
        c = _q(c)
        hit = self._consts.get(c)
        if hit is None:
            hit = RatFnElem(self, self.poly_ring(QQ.convert(c)), self.poly_ring.one, _reduced=True)
            if len(self._consts) < 4096:
                self._consts[c] = hit
        return hit

    @property
    def zero(self):
        return self.const(0)

    @property
    def one(self):
        return self.const(1)

    def var(self, i: int) -> "RatFnElem":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        return RatFnElem(self, self._pgens[i], self.poly_ring.one, _reduced=True)

    @property
    def gens(self):
        return tuple(self.var(i) for i in range(self.nvars))

    def coerce(self, x) -> "RatFnElem":
        if isinstance(x, RatFnElem):
            if x.ring != self:
                raise IncompatibleOperands(f"{x.ring} vs {self}")
            return x
        if isinstance(x, SeriesElem):
            raise IncompatibleOperands("cannot coerce a series to a rational function")
        return self.const(x)

    def parse(self, text: str) -> "RatFnElem":
        return parse_expr(text, self)


class RatFnElem:
    """A quotient ``num/den`` of sympy polynomials, kept in cancelled form."""

    __slots__ = ("ring", "num", "den")

    prec = math.inf

    def __init__(self, ring: RatFnRing, num, den, _reduced=False):
        if not den:
            raise NotAUnit("zero denominator")
        if not _reduced:
            if den.is_ground:
                # polynomial case; cancel() is the bottleneck otherwise
                c = den.LC
                if c != 1:
                    num, den = num.quo_ground(c), den.quo_ground(c)
            else:
                num, den = num.cancel(den)
        self.ring = ring
        self.num = num
        self.den = den

    def _other(self, y) -> "RatFnElem":
        if isinstance(y, RatFnElem):
            if y.ring != self.ring:
                raise IncompatibleOperands(f"{self.ring} vs {y.ring}")
            return y
        if isinstance(y, SeriesElem):
            raise IncompatibleOperands("cannot mix series and rational-function elements")
        return self.ring.const(y)

    @property
    def valuation(self):
        return 0

    def is_zero(self) -> bool:
        return not self.num

    def is_unit(self) -> bool:
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_term(self):
        """Value at the origin (requires the denominator not to vanish there)."""
        z = (0,) * self.ring.nvars
        d0 = self.den.get(z, 0)
        if not d0:
            raise NotAUnit("denominator vanishes at the origin")
        return _q(self.num.get(z, 0) / d0)

    def __add__(self, y):
        y = self._other(y)
        if self.den == y.den:
            return RatFnElem(self.ring, self.num + y.num, self.den, _reduced=self.den.is_one)
        return RatFnElem(self.ring, self.num * y.den + y.num * self.den, self.den * y.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFnElem(self.ring, -self.num, self.den, _reduced=True)

    def __sub__(self, y):
        return self + (-self._other(y))

    def __rsub__(self, y):
        return self._other(y) - self

    def __mul__(self, y):
        y = self._other(y)
        if not self.num or not y.num:
            return self.ring.zero
        if self.den.is_one and y.den.is_one:
            return RatFnElem(self.ring, self.num * y.num, self.den, _reduced=True)
        return RatFnElem(self.ring, self.num * y.num, self.den * y.den)

    __rmul__ = __mul__

    def invert(self) -> "RatFnElem":
        if not self.num:
            raise NotAUnit("zero is not invertible")
        return RatFnElem(self.ring, self.den, self.num)

    def __truediv__(self, y):
        return self * self._other(y).invert()

    def __rtruediv__(self, y):
        return self._other(y) * self.invert()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        return RatFnElem(self.ring, self.num**n, self.den**n, _reduced=True)

    def partial(self, i: int) -> "RatFnElem":
        if not 0 <= i < self.ring.nvars:
            raise IndexError(f"variable index {i} out of range")
        x = self.ring._pgens[i]
        num = self.num.diff(x) * self.den - self.num * self.den.diff(x)
        return RatFnElem(self.ring, num, self.den**2)

    def substitute(self, gs) -> "RatFnElem":
        return substitute(self, gs)

    def to_series(self, sring: SeriesRing) -> SeriesElem:
        """Taylor expansion at the origin to ``sring.degree``."""
        if sring.nvars != self.ring.nvars:
            raise IncompatibleOperands("variable count mismatch")
        num = sring.elem({m: _q(c) for m, c in self.num.terms()})
        den = sring.elem({m: _q(c) for m, c in self.den.terms()})
        return num * den.invert()

    def __eq__(self, y):
        try:
            y = self._other(y)
        except (TypeError, IncompatibleOperands):
            return NotImplemented
        return self.num * y.den == y.num * self.den

    __hash__ = None

    def __repr__(self):
        return f"RatFnElem({self})"

    def __str__(self):
        num = _poly_str({m: _q(c) for m, c in self.num.terms()})
        if self.den == 1:
            return num
        den = _poly_str({m: _q(c) for m, c in self.den.terms()})
        return f"({num})/({den})"


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------


class Substituter:
    """Evaluates ring elements at a fixed tuple ``gs`` of ring elements.

    Monomials ``prod g_i^{e_i}`` are cached, so substituting many elements
    into the same coordinate change costs one product per new monomial.
    """

    def __init__(self, gs: Sequence):
        gs = tuple(gs)
        if not gs:
            raise SubstitutionError("empty substitution")
        r = gs[0].ring
        if any(g.ring != r for g in gs) or len(gs) != r.nvars:
            raise IncompatibleOperands("substitution needs one element per variable, same ring")
        self.ring = r
        self.gs = gs
        if r.kind == "series":
            for g in gs:
                if g.prec >= 0 and g.constant_term() != 0:
                    raise SubstitutionError(
                        "series composition needs origin-preserving components"
                    )
            self._vg = min(max(g.valuation, 1) for g in gs)
            self._pg = min(g.prec for g in gs)
        else:
            # homogenising denominators: P(n/d) = sum c_a prod n^a d^(E-a) / prod d^E
            self._nums = [g.num for g in gs]
            self._dens = [g.den for g in gs]
            self._npow = [[r.poly_ring.one] for _ in gs]
            self._dpow = [[r.poly_ring.one] for _ in gs]
        self._cache: dict = {}

    def _series_mono(self, m, prec):
        key = (m, prec)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not any(m):
            val = self.ring.one.truncate(prec)
        else:
            j = max(i for i, e in enumerate(m) if e)
            mm = list(m)
            mm[j] -= 1
            val = self._series_mono(tuple(mm), prec) * self.gs[j]
            val = val.truncate(prec)
        self._cache[key] = val
        return val

    def _pow(self, table, base, k):
        while len(table) <= k:
            table.append(table[-1] * base)
        return table[k]

    def __call__(self, x):
        if x.ring != self.ring:
            raise IncompatibleOperands(f"{x.ring} vs {self.ring}")
        if self.ring.kind == "series":
            prec = min((x.prec + 1) * self._vg - 1, self._pg, self.ring.degree)
            out: dict = {}
            for m, c in x.coeffs.items():
                if sum(m) * self._vg > prec:
                    continue
                for mm, v in self._series_mono(m, prec).coeffs.items():
                    s = out.get(mm, 0) + c * v
                    out[mm] = s
            return SeriesElem(self.ring, {m: c for m, c in out.items() if c}, prec, _checked=True)
        return self._eval_poly(x.num) / self._eval_poly(x.den)

    def _eval_poly(self, p):
        R = self.ring.poly_ring
        n = self.ring.nvars
        E = [p.degree(i) if p else 0 for i in range(n)]
        E = [max(e, 0) for e in E]
        num = R.zero
        for m, c in p.terms():
            term = R(c)
            for i in range(n):
                term = term * self._pow(self._npow[i], self._nums[i], m[i])
                term = term * self._pow(self._dpow[i], self._dens[i], E[i] - m[i])
            num += term
        den = R.one
        for i in range(n):
            den = den * self._pow(self._dpow[i], self._dens[i], E[i])
        if not den:
            raise SubstitutionError("zero denominator after substitution")
        return RatFnElem(self.ring, num, den)


# ---------------------------------------------------------------------------
# functional interface
# ---------------------------------------------------------------------------


def add(x, y):
    return x + y


def mul(x, y):
    return x * y


def partial(x, i: int):
    return x.partial(i)


def substitute(x, g):
    """``x(g(b))``; ``g`` is a CoordChange, a :class:`Substituter` or a sequence."""
    sub = getattr(g, "substituter", None)
    if sub is None:
        sub = g if isinstance(g, Substituter) else Substituter(g)
    result = sub(x)
    if x.ring.kind == "rational" and not result.den:
        raise SubstitutionError("zero denominator after substitution")
    return result


def invert_unit(x):
    return x.invert()


def to_series(x, sring: SeriesRing) -> SeriesElem:
    if isinstance(x, SeriesElem):
        return x
    return x.to_series(sring)


# ---------------------------------------------------------------------------
# text syntax
# ---------------------------------------------------------------------------


def _poly_str(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for m in sorted(coeffs, key=lambda m: (sum(m), tuple(-e for e in m))):
        c = coeffs[m]
        mono = "*".join(
            f"b{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
        )
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{_qstr(a)}*{mono}"
        else:
            body = _qstr(a)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, body in parts[1:]:
        out += f" {s} {body}"
    return out


def _qstr(c) -> str:
    c = _q(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def parse_expr(text: str, ring):
    """Parse ``b1 + 3/2*b1^2*b2`` style input into an element of ``ring``.

    Integer literals are exact; ``/`` is exact division (by a unit in series
    rings); ``^`` and ``**`` take non-negative integer exponents.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise RingError(f"cannot parse {text!r}: {exc.msg}") from None
    return _eval_node(tree.body, ring, text)


def _eval_node(node, ring, text):
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)):
                raise RingError(f"exponent must be an integer literal in {text!r}")
            return _eval_node(node.left, ring, text) ** exp.value
        left = _eval_node(node.left, ring, text)
        right = _eval_node(node.right, ring, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        return left / right
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, ring, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return ring.const(node.value)
    if isinstance(node, ast.Name) and node.id.startswith("b") and node.id[1:].isdigit():
        i = int(node.id[1:])
        if not 1 <= i <= ring.nvars:
            raise RingError(f"variable {node.id} out of range in {text!r}")
        return ring.var(i - 1)
    if isinstance(node, ast.Name) and node.id == "b" and ring.nvars == 1:
        return ring.var(0)
    raise RingError(f"unsupported syntax in {text!r}")


def parse_list(text: str, ring) -> list:
    """Parse ``[e1, e2, ...]`` (nested lists allowed) into ring elements."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise RingError(f"cannot parse {text!r}: {exc.msg}") from None

    def walk(node):
        if isinstance(node, (ast.List, ast.Tuple)):
            return [walk(e) for e in node.elts]
        return _eval_node(node, ring, text)

    return walk(tree.body)


def from_terms(ring, terms: Iterable[tuple[tuple[int, ...], object]]):
    """Build an element from ``(exponent, coefficient)`` pairs."""
    terms = list(terms)
    if ring.kind == "series":
        return ring.elem(dict(terms))
    R = ring.poly_ring
    return ring.frac(R.from_dict({m: QQ.convert(_q(c)) for m, c in terms}) if terms else R.zero)
