"""Convergents p_n/q_n of a digit sequence.

Rows follow the three-term recurrence

    p_n = m**b_n * p_{n-1} + m**b_{n-1} * p_{n-2}
    q_n = m**b_n * q_{n-1} + m**b_{n-1} * q_{n-2}

seeded with p_0 = 0, q_0 = 1, p_1 = 1, q_1 = m**b_1. A digit of -1 makes
``m**b`` equal to ``1/m``, so p_n and q_n are kept as rationals. They are
never reduced against each other: the determinant identity depends on the
pair exactly as the recurrence produces it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .expansion import Expansion, _power
from .numeric import check_base

__all__ = [
    "ConvergentRow",
    "ConvergentTable",
    "build_table",
    "eval_finite",
    "moebius_with_tail",
    "reconstruct_check",
    "determinant",
]


@dataclass(frozen=True)
class ConvergentRow:
    n: int
    p: Fraction
    q: Fraction
    omega: Fraction

    @property
    def integral(self) -> bool:
        return self.p.denominator == 1 and self.q.denominator == 1


@dataclass(frozen=True)
class ConvergentTable:
    base: int
    digits: tuple
    rows: tuple

    def __len__(self):
        return len(self.rows)

    @property
    def depth(self) -> int:
        return len(self.rows) - 1

    def p(self, n: int) -> Fraction:
        return self.rows[n].p

    def q(self, n: int) -> Fraction:
        return self.rows[n].q

    def omega(self, n: int) -> Fraction:
        return self.rows[n].omega

    def digit(self, n: int) -> int:
        """Digit b_n, 1-based."""
        if n < 1:
            raise IndexError("digits are numbered from 1")
        return self.digits[n - 1]

    def exponent_sum(self, n: int) -> int:
        """b_1 + ... + b_n (0 for n = 0)."""
        return sum(self.digits[:n])


def _check_digits(digits: Sequence[int]) -> tuple:
    digits = tuple(int(b) for b in digits)
    if not digits:
        raise ValueError("digit list is empty")
    bad = [b for b in digits if b < -1]
    if bad:
        raise ValueError(f"digits must be >= -1, got {bad[0]}")
    return digits


def build_table(digits: Sequence[int], m: int, up_to: int | None = None) -> ConvergentTable:
    check_base(m)
    digits = _check_digits(digits)
    if up_to is None:
        up_to = len(digits)
    if not 1 <= up_to <= len(digits):
        raise ValueError(f"up_to must lie in 1..{len(digits)}")
    p_prev, q_prev = Fraction(0), Fraction(1)
    p, q = Fraction(1), _power(m, digits[0])
    rows = [ConvergentRow(0, p_prev, q_prev, Fraction(0)), ConvergentRow(1, p, q, p / q)]
    for n in range(2, up_to + 1):
        lead, trail = _power(m, digits[n - 1]), _power(m, digits[n - 2])
        p, p_prev = lead * p + trail * p_prev, p
        q, q_prev = lead * q + trail * q_prev, q
        rows.append(ConvergentRow(n, p, q, p / q))
    return ConvergentTable(m, digits[:up_to], tuple(rows))


def eval_finite(digits: Sequence[int], m: int) -> Fraction:
    """Evaluate m**-b1 / (1 + m**-b2 / (1 + ... )) from the innermost level out."""
    check_base(m)
    digits = _check_digits(digits)
    value = Fraction(0)
    for b in reversed(digits):
        value = _power(m, -b) / (1 + value)
    return value


def moebius_with_tail(table: ConvergentTable, n: int, t) -> Fraction:
    """(p_n + t m**b_n p_{n-1}) / (q_n + t m**b_n q_{n-1})."""
    if not 1 <= n <= table.depth:
        raise IndexError(f"row {n} outside 1..{table.depth}")
    t = Fraction(t)
    if t < 0:
        raise ValueError("tail must be nonnegative")
    g = t * _power(table.base, table.digit(n))
    return (table.p(n) + g * table.p(n - 1)) / (table.q(n) + g * table.q(n - 1))


def reconstruct_check(x, expansion: Expansion, n: int, table: ConvergentTable | None = None) -> bool:
    """Whether the Moebius form with tail tau^n(x) gives back ``x`` exactly."""
    if not expansion.exact:
        raise TypeError("reconstruction needs the exact remainder of a rational input")
    if not 1 <= n <= len(expansion.digits):
        raise IndexError(f"depth {n} outside 1..{len(expansion.digits)}")
    if table is None or table.depth < n:
        table = build_table(expansion.digits, expansion.base, n)
    return moebius_with_tail(table, n, expansion.iterate(n)) == Fraction(x)


def determinant(table: ConvergentTable, n: int) -> Fraction:
    """p_n q_{n+1} - p_{n+1} q_n."""
    if not 0 <= n < table.depth:
        raise IndexError(f"determinant needs rows {n} and {n + 1} of {table.depth}")
    return table.p(n) * table.q(n + 1) - table.p(n + 1) * table.q(n)
