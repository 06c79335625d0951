"""Small dense matrices over a differential ring, and 2-tensors ``h^{ij} db^i (x) db^j``."""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .diffring import IncompatibleOperands, NotAUnit, PrecisionLost

__all__ = [
    "RingMatrix",
    "TensorForm",
    "jacobian",
    "mat_inverse",
    "dmat",
    "trace_tensor",
    "skew_part",
    "is_closed",
    "NotSkew",
]


_HALF = mpq(1, 2)


class NotSkew(ValueError):
    pass


class RingMatrix:
    """Immutable ``rows x cols`` matrix of ring elements (row-major)."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, entries: Sequence[Sequence]):
        rows = [tuple(ring.coerce(x) for x in row) for row in entries]
        if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
            raise ValueError("ragged or empty matrix")
        self.ring = ring
        self.rows = len(rows)
        self.cols = len(rows[0])
        self.entries = tuple(rows)

    @classmethod
    def identity(cls, ring, n: int) -> "RingMatrix":
        return cls(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, ring, rows: int, cols: int | None = None) -> "RingMatrix":
        return cls(ring, [[0] * (rows if cols is None else cols) for _ in range(rows)])

    @classmethod
    def from_fn(cls, ring, rows: int, cols: int, fn) -> "RingMatrix":
        return cls(ring, [[fn(i, j) for j in range(cols)] for i in range(rows)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def _check(self, other: "RingMatrix", same_shape=True):
        if not isinstance(other, RingMatrix):
            raise TypeError("expected a RingMatrix")
        if other.ring != self.ring:
            raise IncompatibleOperands(f"{self.ring} vs {other.ring}")
        if same_shape and other.shape != self.shape:
            raise IncompatibleOperands(f"shape {self.shape} vs {other.shape}")

    def map(self, fn) -> "RingMatrix":
        return RingMatrix(self.ring, [[fn(x) for x in row] for row in self.entries])

    def __add__(self, other):
        self._check(other)
        return RingMatrix(
            self.ring,
            [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
        )

    def __sub__(self, other):
        self._check(other)
        return RingMatrix(
            self.ring,
            [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
        )

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, c) -> "RingMatrix":
        return self.map(lambda x: x * c)

    def __matmul__(self, other):
        self._check(other, same_shape=False)
        if self.cols != other.rows:
            raise IncompatibleOperands(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries))
        out = []
        for row in self.entries:
            out_row = []
            for col in cols:
                acc = row[0] * col[0]
                for x, y in zip(row[1:], col[1:]):
                    acc = acc + x * y
                out_row.append(acc)
            out.append(out_row)
        return RingMatrix(self.ring, out)

    @property
    def T(self) -> "RingMatrix":
        return RingMatrix(self.ring, list(zip(*self.entries)))

    def trace(self):
        if self.rows != self.cols:
            raise IncompatibleOperands("trace of a non-square matrix")
        acc = self.entries[0][0]
        for i in range(1, self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def partial(self, k: int) -> "RingMatrix":
        return self.map(lambda x: x.partial(k))

    def substitute(self, g) -> "RingMatrix":
        from .diffring import substitute

        return self.map(lambda x: substitute(x, g))

    def det(self):
        if self.rows != self.cols:
            raise IncompatibleOperands("determinant of a non-square matrix")
        return _det([list(r) for r in self.entries])

    def inverse(self) -> "RingMatrix":
        return mat_inverse(self)

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def is_constant(self) -> bool:
        return all(x.is_constant() for row in self.entries for x in row)

    @property
    def prec(self):
        return min(x.prec for row in self.entries for x in row)

    def __eq__(self, other):
        if not isinstance(other, RingMatrix) or other.shape != self.shape:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"RingMatrix([{body}])"


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def jacobian(g) -> RingMatrix:
    """Matrix with entry ``(i, j) = d_i g^j``."""
    comps = tuple(g)
    ring = comps[0].ring
    n = len(comps)
    return RingMatrix(ring, [[comps[j].partial(i) for j in range(n)] for i in range(n)])


def mat_inverse(m: RingMatrix) -> RingMatrix:
    """Gauss-Jordan elimination with unit pivots."""
    if m.rows != m.cols:
        raise IncompatibleOperands("inverse of a non-square matrix")
    n = m.rows
    ring = m.ring
    a = [list(row) + [ring.one if i == j else ring.zero for j in range(n)] for i, row in enumerate(m.entries)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col].is_unit()), None)
        if pivot is None:
            raise NotAUnit("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col].invert()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if _is_exact_zero(f):
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return RingMatrix(ring, [row[n:] for row in a])


def _is_exact_zero(x) -> bool:
    try:
        return x.is_zero()
    except PrecisionLost:
        return False


def dmat(m: RingMatrix) -> list[RingMatrix]:
    """The matrix-valued 1-form ``dm = sum_k (d_k m) db^k`` as the list ``[d_0 m, ...]``."""
    return [m.partial(k) for k in range(m.ring.nvars)]


class TensorForm:
    """``sum mat^{ij} db^i (x) db^j``; skew ones represent 2-forms."""

    __slots__ = ("mat",)

    def __init__(self, mat: RingMatrix):
        if mat.rows != mat.cols or mat.rows != mat.ring.nvars:
            raise IncompatibleOperands("tensor form needs an N x N matrix, N = number of variables")
        self.mat = mat

    @classmethod
    def zero(cls, ring) -> "TensorForm":
        return cls(RingMatrix.zeros(ring, ring.nvars))

    @property
    def ring(self):
        return self.mat.ring

    @property
    def n(self) -> int:
        return self.mat.rows

    def __getitem__(self, ij):
        return self.mat[ij]

    def __add__(self, other):
        return TensorForm(self.mat + _as_mat(other))

    def __sub__(self, other):
        return TensorForm(self.mat - _as_mat(other))

    def __neg__(self):
        return TensorForm(-self.mat)

    def scale(self, c) -> "TensorForm":
        return TensorForm(self.mat.scale(c))

    def transpose(self) -> "TensorForm":
        return TensorForm(self.mat.T)

    def is_zero(self) -> bool:
        return self.mat.is_zero()

    def is_skew(self) -> bool:
        return (self.mat + self.mat.T).is_zero()

    def is_symmetric(self) -> bool:
        return (self.mat - self.mat.T).is_zero()

    def pullback(self, g) -> "TensorForm":
        """``g^* t = dg . t(g(b)) . dg^t`` (coefficients substituted, frame transported)."""
        J = jacobian(g)
        return TensorForm(J @ self.mat.substitute(g) @ J.T)

    @property
    def prec(self):
        return self.mat.prec

    def __eq__(self, other):
        if not isinstance(other, TensorForm):
            return NotImplemented
        return self.mat == other.mat

    __hash__ = None

    def __repr__(self):
        return f"TensorForm({self.mat!r})"


def _as_mat(x) -> RingMatrix:
    return x.mat if isinstance(x, TensorForm) else x


def trace_tensor(P: Sequence[RingMatrix], Q: Sequence[RingMatrix]) -> TensorForm:
    """``tr{P (x) Q}`` for matrix 1-forms ``P = sum P_k db^k``, ``Q = sum Q_l db^l``."""
    if len(P) != len(Q):
        raise IncompatibleOperands("1-forms over different numbers of variables")
    ring = P[0].ring
    n = len(P)
    if P[0].cols != Q[0].rows or P[0].rows != Q[0].cols:
        raise IncompatibleOperands("matrix shapes do not allow a trace")
    return TensorForm(RingMatrix(ring, [[(P[k] @ Q[l]).trace() for l in range(n)] for k in range(n)]))


def skew_part(t: TensorForm) -> TensorForm:
    return TensorForm((t.mat - t.mat.T).scale(_HALF))


def sym_part(t: TensorForm) -> TensorForm:
    return TensorForm((t.mat + t.mat.T).scale(_HALF))


def is_closed(t: TensorForm) -> bool:
    """Closedness of the 2-form ``t^{ij} db^i ^ db^j`` (``t`` skew).

    Checks ``d_k t^{ij} + d_i t^{jk} + d_j t^{ki} = 0`` for ``i < j < k``;
    with fewer than three variables every 2-form is closed.
    """
    if not t.is_skew():
        raise NotSkew("closedness is defined for skew tensor forms")
    n = t.n
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = t[i, j].partial(k) + t[j, k].partial(i) + t[k, i].partial(j)
                if not s.is_zero():
                    return False
    return True

