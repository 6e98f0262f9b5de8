"""Exact values of the form a + b*sqrt(d) with rational a, b.

All arithmetic stays in one quadratic extension of the rationals: mixing
two different irrational bases raises instead of approximating.  Values
are normalized so that the radicand is squarefree (up to a trial-division
bound) and rationals always carry b = 0, d = 1, which makes structural
equality coincide with numeric equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class MixedSurdBasesError(ValueError):
    """Two distinct irrational bases met in one computation."""


_SQUAREFREE_TRIAL_BOUND = 1_000_000


def split_square(n: int) -> tuple[int, int]:
    """Write n = s*s*d with d squarefree (bounded trial division), n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    s, d = 1, n
    f = 2
    while f * f <= d and f <= _SQUAREFREE_TRIAL_BOUND:
        while d % (f * f) == 0:
            d //= f * f
            s *= f
        f += 1 if f == 2 else 2
    r = math.isqrt(d)
    if r * r == d:
        s *= r
        d = 1
    return s, d


@dataclass(frozen=True)
class QuadValue:
    """a + b*sqrt(d); rational iff b == 0 (then d == 1 by normalization)."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        a, b, d = Fraction(self.a), Fraction(self.b), int(self.d)
        if d < 0:
            raise ValueError("negative radicand")
        if b == 0 or d == 0:
            b, d = Fraction(0), 1
        else:
            s, core = split_square(d)
            b *= s
            d = core
            if d == 1:
                a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @property
    def is_rational(self) -> bool:
        return not self.b

    @staticmethod
    def rational(q: Fraction | int) -> QuadValue:
        return QuadValue(Fraction(q))

    @staticmethod
    def _coerce(x) -> QuadValue:
        if isinstance(x, QuadValue):
            return x
        if isinstance(x, (int, Fraction)):
            return QuadValue(Fraction(x))
        return NotImplemented  # type: ignore[return-value]

    def _common_base(self, other: QuadValue) -> int:
        if self.is_rational:
            return other.d
        if other.is_rational:
            return self.d
        if self.d != other.d:
            raise MixedSurdBasesError(f"cannot combine sqrt({self.d}) with sqrt({other.d})")
        return self.d

    def __add__(self, other) -> QuadValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._common_base(other)
        return QuadValue(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self) -> QuadValue:
        return QuadValue(-self.a, -self.b, self.d)

    def __sub__(self, other) -> QuadValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> QuadValue:
        return (-self) + other

    def __mul__(self, other) -> QuadValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._common_base(other)
        return QuadValue(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> QuadValue:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._common_base(other)
        norm = other.a * other.a - other.b * other.b * d
        if not norm:
            raise ZeroDivisionError("division by zero value")
        conj = QuadValue(other.a, -other.b, d)
        num = self * conj
        return QuadValue(num.a / norm, num.b / norm, d)

    def __rtruediv__(self, other) -> QuadValue:
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> QuadValue:
        if exponent < 0:
            return QuadValue.rational(1) / self ** (-exponent)
        out = QuadValue.rational(1)
        for _ in range(exponent):
            out = out * self
        return out

    def __bool__(self) -> bool:
        # a + b*sqrt(d) with squarefree d > 1 is zero only when a = b = 0.
        return bool(self.a or self.b)

    def sign(self) -> int:
        if self.is_rational:
            return (self.a > 0) - (self.a < 0)
        a, b, d = self.a, self.b, self.d
        if a >= 0 and b >= 0:
            return 1 if (a or b) else 0
        if a <= 0 and b <= 0:
            return -1
        # Opposite signs: compare a*a against b*b*d on the dominant side.
        if a > 0:  # b < 0
            return 1 if a * a > b * b * d else -1
        return 1 if b * b * d > a * a else -1

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        other = self._coerce(other)
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return not self <= other

    def __ge__(self, other) -> bool:
        return not self < other

    def __float__(self) -> float:
        if self.is_rational:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"


def exact_rational(q: Fraction | int) -> QuadValue:
    return QuadValue.rational(q)


def surd(a: Fraction | int, b: Fraction | int, d: int) -> QuadValue:
    return QuadValue(Fraction(a), Fraction(b), d)
