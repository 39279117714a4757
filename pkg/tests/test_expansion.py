from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, strategies as st

from mcfrac.convergents import eval_finite
from mcfrac.expansion import (
    DomainError,
    InfiniteDigit,
    PrecisionExhausted,
    digit_b1,
    expand,
    tau_step,
)
from mcfrac.numeric import PrecisionInterval, interval_from_sqrt


def scan_digit(x: Fraction, m: int) -> int:
    """Oracle: the b in -1..60 with m**-(b+1) < x <= m**-b, by brute force."""
    hits = [b for b in range(-1, 61)
            if Fraction(1, m ** (b + 1)) < x <= (Fraction(m) if b < 0 else Fraction(1, m**b))]
    assert len(hits) == 1
    return hits[0]


@pytest.mark.parametrize("x, m, b", [
    (Fraction(1, 3), 2, 1),
    (Fraction(1, 4), 2, 2),
    (Fraction(3, 2), 3, -1),
])
def test_first_digit(x, m, b):
    assert digit_b1(x, m) == b == scan_digit(x, m)


@given(st.integers(2, 12), st.integers(1, 10**9), st.integers(1, 10**9))
def test_first_digit_matches_scan(m, p, q):
    x = Fraction(p, q)
    if x > m - 1:
        x = (m - 1) / x
    assert digit_b1(x, m) == scan_digit(x, m)


def test_first_digit_of_zero_is_infinite():
    with pytest.raises(InfiniteDigit):
        digit_b1(0, 2)


@pytest.mark.parametrize("x, m", [(Fraction(3, 2), 2), (Fraction(-1, 2), 3)])
def test_first_digit_domain(x, m):
    with pytest.raises(DomainError):
        digit_b1(x, m)


@pytest.mark.parametrize("x, m, expected", [
    (Fraction(1, 3), 2, (1, Fraction(1, 2))),
    (Fraction(1, 2), 2, (1, Fraction(0))),
    (Fraction(2, 5), 3, (0, Fraction(3, 2))),
])
def test_tau_step(x, m, expected):
    assert tau_step(x, m) == expected
    b, t = expected
    assert abs(float(m ** -b) / float(x) - 1 - float(t)) < 1e-12


@pytest.mark.parametrize("x, m, digits", [
    (Fraction(7, 11), 2, [0, 0, 0, 1, 1]),
    (Fraction(1, 4), 2, [2]),
    (Fraction(3, 2), 3, [-1, 0]),
    (Fraction(2, 5), 3, [0, -1, 0]),
])
def test_expand_rationals(x, m, digits):
    e = expand(x, m, 100)
    assert list(e.digits) == digits and e.terminated
    assert eval_finite(e.digits, m) == x


def test_expand_zero():
    e = expand(0, 5)
    assert e.digits == () and e.terminated


def test_expand_respects_cap_and_keeps_remainder():
    e = expand(Fraction(1, 7), 5, 10)
    assert len(e.digits) == 10 and not e.terminated
    assert e.remainder == e.iterate(10) != 0


def test_expand_rejects_out_of_domain():
    with pytest.raises(DomainError):
        expand(Fraction(5, 2), 3)


def test_iterates_follow_the_shift_map():
    e = expand(Fraction(7, 11), 2)
    assert list(e.iterates()) == [Fraction(7, 11), Fraction(4, 7), Fraction(3, 4), Fraction(1, 3),
                                  Fraction(1, 2), 0]


@given(st.integers(2, 10), st.integers(1, 400), st.integers(1, 400))
def test_remainders_stay_in_range(m, p, q):
    x = Fraction(p, q)
    if x > m - 1:
        return
    e = expand(x, m, 60)
    for t in list(e.iterates())[1:]:
        assert 0 <= t < m - 1
    assert all(b >= -1 for b in e.digits)


def sqrt2_prefix(shift: Fraction, m: int, bits: int = 512) -> tuple:
    """Oracle: digits shared by exact rational under- and over-approximations of sqrt(2) + shift."""
    s = isqrt(2 << (2 * bits))
    lo = expand(Fraction(s, 1 << bits) + shift, m, 400).digits
    hi = expand(Fraction(s + 1, 1 << bits) + shift, m, 400).digits
    k = 0
    while k < min(len(lo), len(hi)) and lo[k] == hi[k]:
        k += 1
    return lo[:k]


@pytest.mark.parametrize("m, shift", [(2, Fraction(-1)), (3, Fraction(0)), (3, Fraction(-1))])
def test_sqrt2_enclosure_emits_40_digits(m, shift):
    x = interval_from_sqrt(2, 256) + shift
    e = expand(x, m, 40)
    assert len(e.digits) == 40 and not e.terminated
    oracle = sqrt2_prefix(shift, m)
    assert len(oracle) >= 40
    assert e.digits == oracle[:40]


def test_low_precision_exhausts_with_prefix():
    x = interval_from_sqrt(2, 16) - 1
    with pytest.raises(PrecisionExhausted) as info:
        expand(x, 2, 1000)
    prefix = info.value.expansion.digits
    assert info.value.digits_emitted == len(prefix) > 0
    assert prefix == sqrt2_prefix(Fraction(-1), 2)[:len(prefix)]


def test_point_interval_expands_exactly():
    e = expand(PrecisionInterval.point(Fraction(7, 11), 32), 2)
    assert list(e.digits) == [0, 0, 0, 1, 1] and e.terminated


def test_max_digits_from_environment(monkeypatch):
    monkeypatch.setenv("MCF_MAX_DIGITS", "7")
    assert len(expand(Fraction(1, 7), 5).digits) == 7


positive = st.builds(Fraction, st.integers(1, 10**6), st.integers(1, 10**6))


@given(st.integers(2, 10), positive)
def test_tau_step_reconstructs(m, x):
    if x > m - 1:
        x = (m - 1) / x
    b, t = tau_step(x, m)
    assert x == Fraction(m) ** -b / (1 + t)


@given(st.integers(2, 10), positive, st.integers(1, 40))
def test_prefix_stability(m, x, k):
    if x > m - 1:
        x = (m - 1) / x
    short, longer = expand(x, m, k), expand(x, m, k + 1)
    assert longer.digits[:len(short.digits)] == short.digits


@given(st.integers(2, 10), positive)
def test_point_interval_agrees_with_exact(m, x):
    if x > m - 1:
        x = (m - 1) / x
    assert expand(PrecisionInterval.point(x, 32), m, 50).digits == expand(x, m, 50).digits
