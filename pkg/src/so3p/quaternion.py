r"""The definite quaternion algebra H_p = (v, -p | Q_p).

Basis (1, i, j, k) with ``i**2 = v``, ``j**2 = -p``, ``ji = -ij`` and
``k = ij``.  Every further product is derived, not postulated: the
structure-constant table is built once per prime by normal-ordering words
in i and j, and products expand through that table.

The reduced norm ``nrd = q0^2 - v q1^2 + p q2^2 - vp q3^2`` is anisotropic,
so H_p is a division algebra; conjugation by a nonzero element fixes the
trace-zero part and preserves its norm form diag(-v, p, -vp).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .linalg import Mat, QExtElem
from .padic import PrimeCtx

__all__ = [
    "Quat",
    "basis_table",
    "conj_action_matrix",
    "left_regular",
    "quat",
]

_WORDS = ("", "i", "j", "ij")


def _normal_order(word: str, p: int, v: int):
    """Reduce a word in {i, j} to coeff * (normal word) using the relations."""
    coeff = Fraction(1)
    letters = list(word)
    changed = True
    while changed:
        changed = False
        for t in range(len(letters) - 1):
            a, b = letters[t], letters[t + 1]
            if a == "j" and b == "i":
                letters[t], letters[t + 1] = "i", "j"
                coeff = -coeff
                changed = True
                break
            if a == b == "i":
                del letters[t : t + 2]
                coeff = coeff * v
                changed = True
                break
            if a == b == "j":
                del letters[t : t + 2]
                coeff = coeff * -p
                changed = True
                break
    return coeff, "".join(letters)


@lru_cache(maxsize=None)
def basis_table(ctx: PrimeCtx):
    """4x4 table: entry [a][b] is (coefficient, basis index) of e_a * e_b."""
    table = []
    for wa in _WORDS:
        row = []
        for wb in _WORDS:
            coeff, normal = _normal_order(wa + wb, ctx.p, ctx.v)
            row.append((coeff, _WORDS.index(normal)))
        table.append(tuple(row))
    return tuple(table)


@dataclass(frozen=True)
class Quat:
    """A quaternion q0 + q1 i + q2 j + q3 k with exact rational coordinates."""

    ctx: PrimeCtx
    q0: Fraction
    q1: Fraction
    q2: Fraction
    q3: Fraction

    @property
    def coords(self) -> tuple:
        return (self.q0, self.q1, self.q2, self.q3)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "Quat") -> "Quat":
        self._check(other)
        return Quat(self.ctx, *(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Quat":
        return Quat(self.ctx, *(-a for a in self.coords))

    def __sub__(self, other: "Quat") -> "Quat":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Quat):
            return self.scale(other)
        self._check(other)
        table = basis_table(self.ctx)
        out = [Fraction(0)] * 4
        for a, qa in enumerate(self.coords):
            if not qa:
                continue
            for b, qb in enumerate(other.coords):
                if not qb:
                    continue
                coeff, idx = table[a][b]
                out[idx] += coeff * qa * qb
        return Quat(self.ctx, *out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, s) -> "Quat":
        s = Fraction(s)
        return Quat(self.ctx, *(a * s for a in self.coords))

    def conj(self) -> "Quat":
        return Quat(self.ctx, self.q0, -self.q1, -self.q2, -self.q3)

    def trd(self) -> Fraction:
        return 2 * self.q0

    def nrd(self) -> Fraction:
        v, p = self.ctx.v, self.ctx.p
        q0, q1, q2, q3 = self.coords
        return q0 * q0 - v * q1 * q1 + p * q2 * q2 - v * p * q3 * q3

    def inverse(self) -> "Quat":
        if self.is_zero:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj().scale(1 / self.nrd())

    def is_pure(self) -> bool:
        return self.q0 == 0

    def has_unit_norm(self) -> bool:
        return self.nrd() == 1

    def proportional(self, other: "Quat") -> bool:
        """True when the two quaternions differ by a nonzero rational scalar."""
        self._check(other)
        if self.is_zero or other.is_zero:
            return False
        pivot = next(idx for idx, c in enumerate(other.coords) if c)
        lam = self.coords[pivot] / other.coords[pivot]
        return lam != 0 and all(a == lam * b for a, b in zip(self.coords, other.coords))

    def _check(self, other: "Quat"):
        if self.ctx != other.ctx:
            raise ValueError("mixed prime contexts")

    def __repr__(self):
        q0, q1, q2, q3 = self.coords
        return f"Quat({q0} + {q1} i + {q2} j + {q3} k, p={self.ctx.p})"


def quat(ctx: PrimeCtx, q0=0, q1=0, q2=0, q3=0) -> Quat:
    return Quat(ctx, Fraction(q0), Fraction(q1), Fraction(q2), Fraction(q3))


def left_regular(x: Quat) -> Mat:
    """Left multiplication by x in the 2-dimensional Q_p(sqrt(v)) model.

    The determinant of the image equals nrd(x), and the map is an algebra
    homomorphism; both facts are exercised by the test suite.
    """
    v, p = x.ctx.v, x.ctx.p
    q0, q1, q2, q3 = x.coords
    return Mat(
        (
            (QExtElem(q0, q1, v), QExtElem(-p * q2, -p * q3, v)),
            (QExtElem(q2, -q3, v), QExtElem(q0, -q1, v)),
        )
    )


def conj_action_matrix(x: Quat) -> Mat:
    """Matrix of eta -> x eta x**-1 on the trace-zero part, basis (i, j, k).

    Columns act on coordinates; the matrix preserves diag(-v, p, -vp) and
    has determinant 1.
    """
    n = x.nrd()
    if n == 0:
        raise ZeroDivisionError("conjugation needs an invertible quaternion")
    v, p = x.ctx.v, x.ctx.p
    q0, q1, q2, q3 = x.coords
    s0, s1, s2, s3 = q0 * q0, v * q1 * q1, p * q2 * q2, v * p * q3 * q3
    rows = (
        (
            s0 - s1 - s2 + s3,
            2 * p * (q1 * q2 - q0 * q3),
            2 * p * (q0 * q2 - v * q1 * q3),
        ),
        (
            -2 * v * (q0 * q3 + q1 * q2),
            s0 + s1 + s2 + s3,
            2 * v * (q0 * q1 - p * q2 * q3),
        ),
        (
            -2 * (q0 * q2 + v * q1 * q3),
            2 * (q0 * q1 + p * q2 * q3),
            s0 + s1 - s2 - s3,
        ),
    )
    return Mat(tuple(tuple(e / n for e in r) for r in rows))
