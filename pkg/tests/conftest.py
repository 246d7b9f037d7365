"""Shared helpers: seeded value generators and an exact dual-number oracle."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from so3p.padic import canonical_units

PRIMES = (3, 5, 7, 11, 13)


@pytest.fixture(params=PRIMES)
def ctx(request):
    return canonical_units(request.param)


def rand_unit(rng: random.Random, p: int, top: int = 40) -> Fraction:
    """Nonzero rational with numerator and denominator prime to p."""
    while True:
        num, den = rng.randint(1, top), rng.randint(1, top)
        if num % p and den % p:
            sign = -1 if rng.random() < 0.5 else 1
            return Fraction(sign * num, den)


def rand_rational(rng: random.Random, p: int, vmin: int = -3, vmax: int = 3) -> Fraction:
    """Nonzero rational whose p-adic valuation is uniform on [vmin, vmax]."""
    return rand_unit(rng, p) * Fraction(p) ** rng.randint(vmin, vmax)


class Dual:
    """a + b*eps with eps**2 = 0 over exact rationals.

    Evaluating a rational function with b = 1 in one argument yields the
    exact partial derivative in the eps coefficient; used as an
    implementation-independent oracle for Jacobian entries.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _lift(self, other) -> "Dual":
        return other if isinstance(other, Dual) else Dual(other)

    def __add__(self, other):
        other = self._lift(other)
        return Dual(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        return Dual(self.a * other.a, self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        return Dual(self.a / other.a, (self.b * other.a - self.a * other.b) / (other.a * other.a))

    def __rtruediv__(self, other):
        return self._lift(other) / self
