"""Small exact matrices, diagonal quadratic forms, and Q_p(sqrt(v)) scalars.

Everything here is dimension 2 to 4 and entry-generic: entries may be
`Fraction`, :class:`~so3p.padic.PadicApprox`, or :class:`QExtElem`, anything
supporting ring arithmetic.  Determinants use Laplace expansion, which is
exact and cheap at these sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import PrimeCtx, values_agree

__all__ = [
    "Mat",
    "QExtElem",
    "QuadForm",
    "aplus",
    "aplus4",
    "aprime",
    "is_special_isometry",
    "lambda_matrix",
    "lambda_inverse",
    "so2_form",
]


class Mat:
    """An immutable n x n matrix over any exact scalar type."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *a):
        raise AttributeError("Mat is immutable")

    @classmethod
    def identity(cls, n: int) -> "Mat":
        one, zero = Fraction(1), Fraction(0)
        return cls(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, entries) -> "Mat":
        entries = tuple(entries)
        zero = Fraction(0)
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __mul__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        n = self.n
        rows = []
        for i in range(n):
            srow = self.rows[i]
            out = []
            for j in range(n):
                acc = None
                for k in range(n):
                    a = srow[k]
                    # skipping exact zeros is safe; capped-precision zeros
                    # must still propagate their knowledge bound
                    if isinstance(a, Fraction) and not a:
                        continue
                    term = a * other.rows[k][j]
                    acc = term if acc is None else acc + term
                out.append(acc if acc is not None else srow[0] * other.rows[0][j])
            rows.append(tuple(out))
        return Mat(tuple(rows))

    def scale(self, s) -> "Mat":
        return Mat(tuple(tuple(e * s for e in r) for r in self.rows))

    def transpose(self) -> "Mat":
        return Mat(tuple(zip(*self.rows)))

    def trace(self):
        t = self.rows[0][0]
        for i in range(1, self.n):
            t = t + self.rows[i][i]
        return t

    def det(self):
        return _det(self.rows)

    def apply(self, vec) -> tuple:
        vec = tuple(vec)
        n = self.n
        return tuple(sum((self.rows[i][k] * vec[k] for k in range(1, n)), self.rows[i][0] * vec[0]) for i in range(n))

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def agrees(self, other: "Mat") -> bool:
        """Entrywise values_agree; exact equality unless capped precision is involved."""
        if self.n != other.n:
            return False
        return all(
            values_agree(a, b) for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.rows)
        return f"Mat[{body}]"


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = None
    for j in range(n):
        minor = tuple(r[:j] + r[j + 1 :] for r in rows[1:])
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class QuadForm:
    """A diagonal quadratic form sum d_i * x_i**2."""

    name: str
    diag: tuple

    @property
    def dim(self) -> int:
        return len(self.diag)

    def gram(self) -> Mat:
        return Mat.diagonal(self.diag)

    def eval(self, vec):
        vec = tuple(vec)
        if len(vec) != self.dim:
            raise ValueError(f"{self.name} expects {self.dim} coordinates")
        acc = self.diag[0] * vec[0] * vec[0]
        for d, x in zip(self.diag[1:], vec[1:]):
            acc = acc + d * x * x
        return acc


def so2_form(ctx: PrimeCtx, d: Fraction) -> QuadForm:
    if d not in ctx.so2_catalog().values():
        raise ValueError(f"d = {d} is outside the catalog for p = {ctx.p}")
    return QuadForm(name=f"diag(1,{d})", diag=(Fraction(1), Fraction(d)))


def aplus(ctx: PrimeCtx) -> QuadForm:
    return QuadForm(name="A+", diag=(Fraction(1), Fraction(-ctx.v), Fraction(ctx.p)))


def aplus4(ctx: PrimeCtx) -> QuadForm:
    return QuadForm(
        name="A+4",
        diag=(Fraction(1), Fraction(-ctx.v), Fraction(ctx.p), Fraction(-ctx.v * ctx.p)),
    )


def aprime(ctx: PrimeCtx) -> QuadForm:
    """The restriction of the quaternion norm to trace-zero elements."""
    return QuadForm(name="A'", diag=(Fraction(-ctx.v), Fraction(ctx.p), Fraction(-ctx.v * ctx.p)))


def is_special_isometry(m: Mat, form: QuadForm) -> bool:
    """True when m preserves the form and has determinant 1.

    Uses digitwise agreement when capped-precision entries are present, exact
    equality otherwise.  The form is diagonal and the congruence product is
    symmetric, so only its upper triangle is evaluated.
    """
    if m.n != form.dim:
        return False
    diag = form.diag
    n = m.n
    zero = Fraction(0)
    for i in range(n):
        for j in range(i, n):
            acc = diag[0] * m.rows[0][i] * m.rows[0][j]
            for k in range(1, n):
                acc = acc + diag[k] * m.rows[k][i] * m.rows[k][j]
            if not values_agree(acc, diag[i] if i == j else zero):
                return False
    return values_agree(m.det(), Fraction(1))


def lambda_matrix(ctx: PrimeCtx) -> Mat:
    """Antidiagonal change of basis carrying the conjugation action into SO(3)."""
    z, p, v = Fraction(0), ctx.p, ctx.v
    return Mat(
        (
            (z, z, Fraction(-v * p)),
            (z, Fraction(p), z),
            (Fraction(-v), z, z),
        )
    )


def lambda_inverse(ctx: PrimeCtx) -> Mat:
    z, p, v = Fraction(0), ctx.p, ctx.v
    return Mat(
        (
            (z, z, Fraction(-1, v)),
            (z, Fraction(1, p), z),
            (Fraction(-1, v * p), z, z),
        )
    )


@dataclass(frozen=True)
class QExtElem:
    """An element a + b*sqrt(v) of the quadratic extension Q_p(sqrt(v)).

    v is a non-square unit, so the extension is a field; these scalars carry
    the two-dimensional matrix model of the quaternions.
    """

    a: Fraction
    b: Fraction
    v: int

    def _check(self, other: "QExtElem"):
        if self.v != other.v:
            raise ValueError("mixed extensions")

    def _lift(self, other) -> "QExtElem":
        if isinstance(other, QExtElem):
            self._check(other)
            return other
        return QExtElem(Fraction(other), Fraction(0), self.v)

    def __add__(self, other):
        other = self._lift(other)
        return QExtElem(self.a + other.a, self.b + other.b, self.v)

    __radd__ = __add__

    def __neg__(self):
        return QExtElem(-self.a, -self.b, self.v)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        return QExtElem(
            self.a * other.a + self.v * self.b * other.b,
            self.a * other.b + self.b * other.a,
            self.v,
        )

    __rmul__ = __mul__

    def conj(self) -> "QExtElem":
        return QExtElem(self.a, -self.b, self.v)

    def norm(self) -> Fraction:
        return self.a * self.a - self.v * self.b * self.b

    def inverse(self) -> "QExtElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse")
        return QExtElem(self.a / n, -self.b / n, self.v)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.v}))"
