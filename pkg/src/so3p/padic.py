r"""Exact p-adic scalar arithmetic over the rationals.

Numbers are plain `fractions.Fraction` values; this module supplies the
p-adic structure on top of them: valuation, absolute value, square-class
classification, and a capped-precision companion type ``PadicApprox`` for
square roots that exist in Z_p but not in Q.

Conventions, fixed once per prime by :func:`canonical_units`:

* ``p`` is an odd prime, ``p >= 3``;
* ``u`` is the smallest positive quadratic non-residue mod p;
* ``v = -1`` when ``p = 3 (mod 4)``, else ``v = -u``; either way ``v`` is a
  unit and not a square, so ``x**2 = v`` has no solution in Q_p.

The classes of ``Q_p^* / (Q_p^*)^2`` are represented by ``{1, u, p, up}``
and form a Klein four-group under multiplication.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import PrecisionExhausted, SquareClassError

__all__ = [
    "INF",
    "Infinity",
    "PadicApprox",
    "PrimeCtx",
    "ProjPoint",
    "SquareClass",
    "abs_p",
    "canonical_units",
    "hensel_sqrt",
    "is_square",
    "rational_sqrt",
    "square_class",
    "to_approx",
    "unit_residue",
    "valuation",
    "values_agree",
]


# Deterministic Miller-Rabin witnesses, sufficient for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a mod p (odd prime, a a nonzero residue), Tonelli-Shanks."""
    a %= p
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Write p - 1 = q * 2^s with q odd.
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


class Infinity:
    """The point at infinity of the projective parameter line.

    A singleton; compares equal only to itself.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = Infinity()


class SquareClass(enum.Enum):
    """Coset of (Q_p^*)^2 in Q_p^*, labelled by its representative."""

    ONE = "1"
    U = "u"
    P = "p"
    UP = "up"

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        a, b = _CLASS_BITS[self], _CLASS_BITS[other]
        return _BITS_CLASS[(a[0] ^ b[0], a[1] ^ b[1])]


# (non-residue bit, odd-valuation bit); the group law is componentwise xor.
_CLASS_BITS = {
    SquareClass.ONE: (0, 0),
    SquareClass.U: (1, 0),
    SquareClass.P: (0, 1),
    SquareClass.UP: (1, 1),
}
_BITS_CLASS = {bits: cls for cls, bits in _CLASS_BITS.items()}


@dataclass(frozen=True)
class PrimeCtx:
    """An odd prime together with its canonical unit choices."""

    p: int
    u: int
    v: int

    @property
    def d_z(self) -> Fraction:
        return Fraction(-self.v)

    @property
    def d_y(self) -> Fraction:
        return Fraction(self.p)

    @property
    def d_x(self) -> Fraction:
        return Fraction(-self.p, self.v)

    def so2_catalog(self) -> dict:
        return {
            "-v": Fraction(-self.v),
            "p": Fraction(self.p),
            "up": Fraction(self.u * self.p),
            "-p/v": Fraction(-self.p, self.v),
        }

    def __repr__(self):
        return f"PrimeCtx(p={self.p}, u={self.u}, v={self.v})"


@lru_cache(maxsize=None)
def canonical_units(p: int) -> PrimeCtx:
    """Context for the prime p: smallest non-residue u and the unit v.

    Raises ValueError unless p is an odd prime, p >= 3.
    """
    if p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime >= 3, got {p}")
    u = 2
    while pow(u, (p - 1) // 2, p) == 1:
        u += 1
    v = -1 if p % 4 == 3 else -u
    return PrimeCtx(p=p, u=u, v=v)


def _vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero integer")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def valuation(x, p: int):
    """p-adic valuation; 0 maps to +infinity (math.inf)."""
    if isinstance(x, PadicApprox):
        if x.is_zero:
            return math.inf
        return x.val
    x = Fraction(x)
    if x == 0:
        return math.inf
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def abs_p(x, p: int) -> Fraction:
    """p-adic absolute value |x|_p = p**(-valuation); |0|_p = 0."""
    v = valuation(x, p)
    if v == math.inf:
        return Fraction(0)
    return Fraction(1, p**v) if v >= 0 else Fraction(p ** (-v))


def unit_residue(x, p: int) -> int:
    """Residue mod p of the unit part x * p**(-valuation(x)); x must be nonzero."""
    if isinstance(x, PadicApprox):
        if x.is_zero:
            raise ValueError("unit residue of zero")
        return x.mant % p
    x = Fraction(x)
    if x == 0:
        raise ValueError("unit residue of zero")
    num, den = x.numerator, x.denominator
    num //= p ** _vp_int(num, p)
    den //= p ** _vp_int(den, p)
    return num * pow(den, -1, p) % p


def square_class(x, ctx: PrimeCtx) -> SquareClass:
    """Class of nonzero x in Q_p^* / (Q_p^*)^2, one of {1, u, p, up}."""
    p = ctx.p
    v = valuation(x, p)
    if v == math.inf:
        raise ValueError("square class of zero undefined")
    res = unit_residue(x, p)
    nonsquare_unit = pow(res, (p - 1) // 2, p) != 1
    return _BITS_CLASS[(int(nonsquare_unit), v % 2)]


def is_square(x, ctx: PrimeCtx) -> bool:
    return square_class(x, ctx) is SquareClass.ONE


@dataclass(frozen=True)
class PadicApprox:
    """A p-adic number known to finitely many significant digits.

    Represents ``p**val * mant`` where the unit mantissa satisfies
    ``1 <= mant < p**n`` and ``mant % p != 0``; the value is known modulo
    ``p**(val + n)``.  A zero has ``mant == n == 0`` and means
    ``0 + O(p**val)``: indistinguishable from 0 at that knowledge bound.
    The exact zero carries ``val = math.inf``.

    Addition and subtraction lose digits to cancellation: the known-digit
    count drops by the valuation jump of the result relative to the inputs,
    and when every known digit cancels the result collapses to a zero whose
    bound records how far the cancellation was actually checked.
    """

    p: int
    val: int | float  # math.inf only on the exact zero
    mant: int
    n: int

    def __post_init__(self):
        if self.mant == 0:
            if self.n != 0:
                raise ValueError("zero approx must have n == 0")
        else:
            if self.n < 1 or not (1 <= self.mant < self.p**self.n):
                raise ValueError("mantissa out of range for stated precision")
            if self.mant % self.p == 0:
                raise ValueError("mantissa must be a unit")

    @classmethod
    def zero(cls, p: int, known: int | float = math.inf) -> "PadicApprox":
        return cls(p=p, val=known, mant=0, n=0)

    @classmethod
    def from_rational(cls, x, p: int, n: int) -> "PadicApprox":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        if n < 1:
            raise ValueError("need at least one digit")
        v = valuation(x, p)
        num, den = x.numerator, x.denominator
        num //= p ** _vp_int(num, p)
        den //= p ** _vp_int(den, p)
        mod = p**n
        mant = num * pow(den, -1, mod) % mod
        return cls(p=p, val=v, mant=mant, n=n)

    @property
    def is_zero(self) -> bool:
        return self.mant == 0

    def digits(self) -> tuple:
        """Base-p digits of the mantissa, least significant first."""
        out, m = [], self.mant
        for _ in range(self.n):
            m, d = divmod(m, self.p)
            out.append(d)
        return tuple(out)

    # Absolute precision: the value is known modulo p**abs_known.
    @property
    def abs_known(self) -> int:
        return self.val + self.n

    def _coerce(self, other) -> "PadicApprox":
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        x = Fraction(other)
        if x == 0:
            return PadicApprox.zero(self.p)
        if math.isinf(self.abs_known):
            digits = 1
        else:
            digits = max(1, self.abs_known - valuation(x, self.p))
        return PadicApprox.from_rational(x, self.p, digits)

    def _compose(self, v: int, t: int, width: int) -> "PadicApprox":
        # t is the value scaled by p**-v, known modulo p**width.
        if width < 1:
            raise PrecisionExhausted("no digits remain")
        t %= self.p**width
        if t == 0:
            return PadicApprox.zero(self.p, v + width)
        j = _vp_int(t, self.p)
        return PadicApprox(p=self.p, val=v + j, mant=t // self.p**j, n=width - j)

    def _truncated(self, know) -> "PadicApprox":
        """This value with absolute knowledge capped at O(p**know)."""
        if know >= self.abs_known:
            return self
        if self.val >= know:
            return PadicApprox.zero(self.p, know)
        return PadicApprox(
            p=self.p, val=self.val, mant=self.mant % self.p ** (know - self.val), n=know - self.val
        )

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero or other.is_zero:
            # x + (0 + O(p^k)) is x truncated to knowledge k.
            zero, x = (self, other) if self.is_zero else (other, self)
            if x.is_zero:
                return x if x.val <= zero.val else zero
            return x._truncated(zero.val)
        know = min(self.abs_known, other.abs_known)
        v = min(self.val, other.val)
        t = self.mant * self.p ** (self.val - v) + other.mant * self.p ** (other.val - v)
        return self._compose(v, t, know - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return PadicApprox(p=self.p, val=self.val, mant=self.p**self.n - self.mant, n=self.n)

    def __sub__(self, other):
        try:
            coerced = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-coerced)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero or other.is_zero:
            # (0 + O(p^k)) * x = 0 + O(p^(k + v(x))).
            return PadicApprox.zero(self.p, self.val + other.val)
        n = min(self.n, other.n)
        mant = self.mant * other.mant % self.p**n
        return PadicApprox(p=self.p, val=self.val + other.val, mant=mant, n=n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by p-adic zero")
        if self.is_zero:
            return PadicApprox.zero(self.p, self.val - other.val)
        n = min(self.n, other.n)
        mod = self.p**n
        mant = self.mant * pow(other.mant, -1, mod) % mod
        return PadicApprox(p=self.p, val=self.val - other.val, mant=mant, n=n)

    def __rtruediv__(self, other):
        coerced = self._coerce(other)
        return coerced / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = PadicApprox.from_rational(1, self.p, self.n if self.n else 1)
        base = self
        for _ in range(k):
            out = out * base
        return out

    def congruent(self, other) -> bool:
        """True when the two values agree on all overlapping known digits."""
        return (self - other).is_zero

    def __repr__(self):
        if self.is_zero:
            if math.isinf(self.val):
                return f"PadicApprox(0, p={self.p})"
            return f"PadicApprox(0 + O({self.p}^{self.val}))"
        ds = ",".join(str(d) for d in self.digits())
        return f"PadicApprox({self.p}^{self.val} * [{ds}])"


ProjPoint = Union[Fraction, PadicApprox, Infinity]


def to_approx(x, ctx: PrimeCtx, n: int) -> PadicApprox:
    """Truncate an exact rational to n significant p-adic digits."""
    return PadicApprox.from_rational(x, ctx.p, n)


def rational_sqrt(x) -> Fraction | None:
    """The positive exact rational square root of x, or None if there is none."""
    x = Fraction(x)
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn != x.numerator or rd * rd != x.denominator:
        return None
    return Fraction(rn, rd)


def hensel_sqrt(a, ctx: PrimeCtx, n: int) -> PadicApprox:
    """Canonical square root of a in Q_p to n significant digits.

    The canonical branch is the root whose leading digit lies in
    ``{1, ..., (p-1)/2}``.  The result r satisfies
    ``r*r = a (mod p**(valuation(a) + n))``.

    Raises SquareClassError (carrying the offending class) when a is not a
    square in Q_p.  ``a == 0`` returns the exact zero.
    """
    p = ctx.p
    if isinstance(a, PadicApprox):
        if a.p != p:
            raise ValueError("mixed primes")
        if a.is_zero:
            # sqrt(0 + O(p^k)) is 0 + O(p^ceil(k/2)).
            return PadicApprox.zero(p, a.val if math.isinf(a.val) else -(-a.val // 2))
        val, digits = a.val, min(n, a.n)
        unit_mod = lambda m: a.mant % p**m  # noqa: E731
    else:
        a = Fraction(a)
        if a == 0:
            return PadicApprox.zero(p)
        val, digits = valuation(a, p), n
        num, den = a.numerator, a.denominator
        num //= p ** _vp_int(num, p)
        den //= p ** _vp_int(den, p)
        unit_mod = lambda m: num * pow(den, -1, p**m) % p**m  # noqa: E731
    cls = square_class(a, ctx)
    if cls is not SquareClass.ONE:
        raise SquareClassError(f"not a square in Q_{p}: class {cls.value}", square_class=cls)
    if digits < 1:
        raise PrecisionExhausted("no digits available for the root")
    r = _sqrt_mod_prime(unit_mod(1), p)
    known = 1
    while known < digits:
        known = min(2 * known, digits)
        mod = p**known
        w = unit_mod(known)
        # Newton step x -> (x + w/x) / 2 doubles the number of correct digits.
        r = (r + w * pow(r, -1, mod)) * pow(2, -1, mod) % mod
    if r % p > (p - 1) // 2:
        r = p**digits - r
    return PadicApprox(p=p, val=val // 2, mant=r, n=digits)


def values_agree(x, y, p: int | None = None) -> bool:
    """Equality that degrades to digitwise agreement for capped-precision values.

    Exact operands compare exactly; when a PadicApprox is involved the
    comparison checks congruence on the overlapping known digits.
    """
    if isinstance(x, Infinity) or isinstance(y, Infinity):
        return x is y
    if isinstance(x, PadicApprox):
        return x.congruent(y)
    if isinstance(y, PadicApprox):
        return y.congruent(x)
    return Fraction(x) == Fraction(y)
