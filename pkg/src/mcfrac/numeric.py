"""Exact rationals, power-of-base comparisons and outward-rounded intervals.

Every comparison against ``m**e`` is done by integer cross-multiplication.
Nothing in this package evaluates a floating-point logarithm to decide a digit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

__all__ = [
    "Ordering",
    "ZeroDenominatorError",
    "make_rational",
    "check_base",
    "cmp_power",
    "ilog",
    "PrecisionInterval",
    "interval_from_sqrt",
    "certain_cmp_power",
    "fibonacci",
]


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNKNOWN = None

    @classmethod
    def of(cls, lhs: int, rhs: int) -> "Ordering":
        if lhs < rhs:
            return cls.LESS
        if lhs > rhs:
            return cls.GREATER
        return cls.EQUAL


class ZeroDenominatorError(ZeroDivisionError):
    """Raised when a rational is built with denominator zero."""


def make_rational(p: int, q: int) -> Fraction:
    """Return ``p/q`` in lowest terms with the sign on the numerator."""
    if q == 0:
        raise ZeroDenominatorError(f"zero denominator in {p}/{q}")
    return Fraction(p, q)


def check_base(m: int) -> int:
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise ValueError(f"base must be an integer >= 2, got {m!r}")
    return m


def cmp_power(x: Fraction, m: int, e: int) -> Ordering:
    """Compare ``x`` with ``m**e`` exactly."""
    x = Fraction(x)
    if e < 0:
        return Ordering.of(x.numerator * m ** (-e), x.denominator)
    return Ordering.of(x.numerator, x.denominator * m**e)


@lru_cache(maxsize=None)
def _log2_fixed(m: int, frac_bits: int = 40) -> int:
    """floor(log2(m) * 2**frac_bits), by repeated squaring of a fixed-point mantissa."""
    k = m.bit_length() - 1
    guard = frac_bits + 16
    one = 1 << guard
    y = (m << guard) >> k  # m / 2**k in [1, 2)
    acc = k
    for _ in range(frac_bits):
        y = (y * y) >> guard
        acc <<= 1
        if y >= 2 * one:
            y >>= 1
            acc |= 1
    return acc


def ilog(n: int, m: int) -> int:
    """Largest ``e`` with ``m**e <= n`` for a positive integer ``n``.

    A first guess comes from bit lengths and an integer approximation of
    log2(m); it is then corrected with exact comparisons (usually zero or
    one step).
    """
    if n < 1:
        raise ValueError("ilog needs n >= 1")
    if n < m:
        return 0
    frac_bits = 40
    e = ((n.bit_length() - 1) << frac_bits) // (_log2_fixed(m, frac_bits) + 1)
    pw = m**e
    while pw > n:
        e -= 1
        pw //= m
    while pw * m <= n:
        e += 1
        pw *= m
    return e


# --------------------------------------------------------------------------
# intervals


def _round_down(x: Fraction, precision: int) -> Fraction:
    """Largest dyadic with ``precision`` significant bits that is <= x."""
    if x == 0:
        return x
    num, den = x.numerator, x.denominator
    # 2**(e-1) <= |x| < 2**(e+1) roughly; exact scaling below only needs a bound
    e = abs(num).bit_length() - den.bit_length()
    shift = precision - e
    if shift >= 0:
        return Fraction((num << shift) // den, 1 << shift)
    return Fraction((num // (den << -shift)) << -shift)


def _round_up(x: Fraction, precision: int) -> Fraction:
    return -_round_down(-x, precision)


@dataclass(frozen=True)
class PrecisionInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints.

    Arithmetic results are rounded outward to ``precision`` significant bits.
    Operations whose operands are all points are carried out exactly and stay
    points, so a degenerate interval behaves like its rational value.
    """

    lo: Fraction
    hi: Fraction
    precision: int = 64

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        if self.precision < 1:
            raise ValueError("precision must be a positive number of bits")

    @classmethod
    def point(cls, x, precision: int = 64) -> "PrecisionInterval":
        x = Fraction(x)
        return cls(x, x, precision)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def _coerce(self, other) -> "PrecisionInterval":
        if isinstance(other, PrecisionInterval):
            return other
        return PrecisionInterval.point(other, self.precision)

    def _make(self, lo: Fraction, hi: Fraction, exact: bool, precision: int) -> "PrecisionInterval":
        if not exact:
            lo, hi = _round_down(lo, precision), _round_up(hi, precision)
        return PrecisionInterval(lo, hi, precision)

    def __add__(self, other):
        o = self._coerce(other)
        return self._make(self.lo + o.lo, self.hi + o.hi, self.is_point and o.is_point,
                          min(self.precision, o.precision))

    __radd__ = __add__

    def __neg__(self):
        return PrecisionInterval(-self.hi, -self.lo, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        products = [a * b for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return self._make(min(products), max(products), self.is_point and o.is_point,
                          min(self.precision, o.precision))

    __rmul__ = __mul__

    def reciprocal(self) -> "PrecisionInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return self._make(1 / self.hi, 1 / self.lo, self.is_point, self.precision)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return PrecisionInterval(Fraction(0), max(-self.lo, self.hi), self.precision)

    def with_precision(self, precision: int) -> "PrecisionInterval":
        return PrecisionInterval(self.lo, self.hi, precision)


def interval_from_sqrt(n: int, precision: int) -> PrecisionInterval:
    """Enclosure of sqrt(n) of width at most ``2**-precision``."""
    if n < 0:
        raise ValueError("sqrt of a negative integer")
    if precision < 1:
        raise ValueError("precision must be positive")
    r = isqrt(n)
    if r * r == n:
        return PrecisionInterval.point(r, precision)
    s = isqrt(n << (2 * precision))
    scale = 1 << precision
    return PrecisionInterval(Fraction(s, scale), Fraction(s + 1, scale), precision)


def certain_cmp_power(x: PrecisionInterval, m: int, e: int) -> Ordering:
    """Ordering of every point of ``x`` against ``m**e``, or UNKNOWN."""
    lo = cmp_power(x.lo, m, e)
    if lo is Ordering.GREATER:
        return lo
    hi = cmp_power(x.hi, m, e)
    if hi is Ordering.LESS:
        return hi
    if lo is Ordering.EQUAL and hi is Ordering.EQUAL:
        return Ordering.EQUAL
    return Ordering.UNKNOWN


def fibonacci(n: int) -> int:
    """Fibonacci numbers indexed so that F(0) = F(1) = 1."""
    if n < 0:
        raise ValueError("fibonacci index must be nonnegative")
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a
