"""Digit extraction and the shift map for base-m continued fractions.

A number x in [0, m-1] is written as

    x = m**-b1 / (1 + m**-b2 / (1 + ...)),   b_n >= -1,

where the digit ``b`` of ``x`` is the unique integer with
``m**-(b+1) < x <= m**-b`` and the next remainder is ``m**-b / x - 1``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .numeric import PrecisionInterval, _round_down, _round_up, check_base, cmp_power, ilog, Ordering

__all__ = [
    "DEFAULT_MAX_DIGITS",
    "DomainError",
    "InfiniteDigit",
    "PrecisionExhausted",
    "Expansion",
    "NumberInput",
    "digit_b1",
    "tau_step",
    "expand",
    "default_max_digits",
]

DEFAULT_MAX_DIGITS = 5000

NumberInput = Union[Fraction, int, PrecisionInterval]


class DomainError(ValueError):
    """Input outside the interval the expansion is defined on."""


class InfiniteDigit(DomainError):
    """The digit of zero is infinite; zero has the empty expansion."""


class PrecisionExhausted(ArithmeticError):
    """An enclosure straddles a digit boundary.

    ``expansion`` holds the certified prefix, ``digits_emitted`` its length.
    """

    def __init__(self, expansion: "Expansion"):
        self.expansion = expansion
        self.digits_emitted = len(expansion.digits)
        super().__init__(
            f"precision exhausted after {self.digits_emitted} digits "
            f"(base {expansion.base}, remainder {expansion.remainder})"
        )


def default_max_digits() -> int:
    """Digit cap, overridable through ``MCF_MAX_DIGITS``."""
    raw = os.environ.get("MCF_MAX_DIGITS")
    if raw is None:
        return DEFAULT_MAX_DIGITS
    cap = int(raw)
    if cap < 1:
        raise ValueError("MCF_MAX_DIGITS must be a positive integer")
    return cap


@dataclass(frozen=True)
class Expansion:
    """Digits of ``source`` in base ``base``.

    ``remainder`` is the shift-map iterate where the run stopped: an exact
    rational for rational input, an interval for interval input, ``0`` when
    ``terminated``.
    """

    base: int
    digits: tuple
    terminated: bool
    remainder: Union[Fraction, PrecisionInterval, None]
    source: Union[Fraction, PrecisionInterval, None] = None

    @property
    def exact(self) -> bool:
        return isinstance(self.source, Fraction)

    def iterates(self) -> Iterator[Fraction]:
        """Yield the exact remainders tau^0(x), tau^1(x), ... tau^N(x)."""
        if not self.exact:
            raise TypeError("remainders are only tracked exactly for rational input")
        m = self.base
        x = self.source
        yield x
        for b in self.digits:
            x = _power(m, -b) / x - 1
            yield x

    def iterate(self, n: int) -> Fraction:
        """The n-th remainder tau^n(x), 0 <= n <= len(digits)."""
        if not 0 <= n <= len(self.digits):
            raise IndexError(f"iterate {n} outside 0..{len(self.digits)}")
        for k, t in enumerate(self.iterates()):
            if k == n:
                return t
        raise AssertionError("unreachable")


def _power(m: int, e: int) -> Fraction:
    return Fraction(m**e) if e >= 0 else Fraction(1, m ** (-e))


def _digit_of(num: int, den: int, m: int) -> int:
    # num/den > 0 and at most m: the digit is floor(log_m(den/num)) >= -1
    if den < num:
        return -1
    return ilog(den // num, m)


def _step(num: int, den: int, m: int):
    """One shift-map step on a positive reduced fraction, all in integers."""
    b = _digit_of(num, den, m)
    if b < 0:
        top, bottom = m * den - num, num
    else:
        scale = m**b
        top, bottom = den - num * scale, num * scale
    return b, Fraction(top, bottom)


def _check_point(x, m: int) -> Fraction:
    x = Fraction(x)
    if x == 0:
        raise InfiniteDigit("the digit of 0 is infinite")
    if x < 0 or x > m - 1:
        raise DomainError(f"{x} is outside (0, {m - 1}]")
    return x


def digit_b1(x, m: int) -> int:
    """The first digit of ``x``: the ``b >= -1`` with m**-(b+1) < x <= m**-b."""
    check_base(m)
    x = _check_point(x, m)
    return _digit_of(x.numerator, x.denominator, m)


def tau_step(x, m: int):
    """Return ``(b, x')`` with ``x = m**-b / (1 + x')`` and ``0 <= x' < m - 1``."""
    check_base(m)
    x = _check_point(x, m)
    return _step(x.numerator, x.denominator, m)


def expand(x: NumberInput, m: int, max_digits: int | None = None) -> Expansion:
    """Expand ``x`` to at most ``max_digits`` digits.

    Rational input is expanded exactly and stops early once the remainder is
    zero. Interval input emits a digit only when both of its bracketing
    comparisons hold over the whole enclosure; otherwise
    :class:`PrecisionExhausted` is raised carrying the certified prefix.
    """
    check_base(m)
    if max_digits is None:
        max_digits = default_max_digits()
    if max_digits < 1:
        raise ValueError("max_digits must be positive")
    if isinstance(x, PrecisionInterval):
        return _expand_interval(x, m, max_digits)
    x = Fraction(x)
    if x < 0 or x > m - 1:
        raise DomainError(f"{x} is outside [0, {m - 1}]")
    digits = []
    r = x
    while r and len(digits) < max_digits:
        b, r = _step(r.numerator, r.denominator, m)
        digits.append(b)
    return Expansion(m, tuple(digits), r == 0, r, x)


def _expand_interval(x: PrecisionInterval, m: int, max_digits: int) -> Expansion:
    if x.lo < 0 or x.hi > m - 1:
        raise DomainError(f"enclosure [{x.lo}, {x.hi}] is not inside [0, {m - 1}]")
    prec = x.precision
    lo, hi = x.lo, x.hi
    digits = []
    top = Fraction(m - 1)
    while len(digits) < max_digits:
        if lo == hi:
            if lo == 0:
                break
            b, r = _step(lo.numerator, lo.denominator, m)
            digits.append(b)
            lo = hi = r
            continue
        if lo <= 0:
            raise PrecisionExhausted(
                Expansion(m, tuple(digits), False, PrecisionInterval(lo, hi, prec), x))
        b = _digit_of(hi.numerator, hi.denominator, m)
        if cmp_power(lo, m, -(b + 1)) is not Ordering.GREATER:
            raise PrecisionExhausted(
                Expansion(m, tuple(digits), False, PrecisionInterval(lo, hi, prec), x))
        digits.append(b)
        scale = _power(m, -b)
        new_lo = max(_round_down(scale / hi - 1, prec), Fraction(0))
        new_hi = min(_round_up(scale / lo - 1, prec), top)
        lo, hi = new_lo, new_hi
    terminated = lo == hi == 0
    return Expansion(m, tuple(digits), terminated, PrecisionInterval(lo, hi, prec), x)
