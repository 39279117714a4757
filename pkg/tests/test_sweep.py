"""The integer kernel against a plain Fraction evaluation of each claim."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mcfrac.convergents import build_table, moebius_with_tail
from mcfrac.expansion import expand
from mcfrac.numeric import fibonacci
from mcfrac.sweep import CLAIMS, _compare, sweep_rational


def reference_failures(x: Fraction, m: int, cap: int) -> dict:
    """Claim -> (checked, failures inside condition, failures outside), via Fractions."""
    e = expand(x, m, cap)
    digits = e.digits
    out = {c: [0, 0, 0] for c in CLAIMS}
    if not digits:
        return out

    def record(claim, ok, inside=True):
        out[claim][0] += 1
        if not ok:
            out[claim][1 if inside else 2] += 1

    t = build_table(digits, m)
    taus = list(e.iterates())
    N = len(digits)
    for n in range(1, N + 1):
        b = digits[n - 1]
        S = sum(digits[:n])
        nonneg = min(digits[:n]) >= 0
        tau = taus[n]
        record("digit-domain", b >= -1 and 0 <= tau < m - 1)
        record("reconstruction", moebius_with_tail(t, n, tau) == x)
        err = x - t.omega(n)
        q, q1 = t.q(n), t.q(n - 1)
        h = Fraction(m) ** b
        record("error-formula", err == (-1) ** n * tau * Fraction(m) ** S / (q * (q + tau * h * q1)))
        record("q-power-floor", q >= Fraction(m) ** S)
        if n >= 2:
            record("q-fibonacci-floor", q >= fibonacci(n), nonneg)
        record("integrality", t.p(n).denominator == 1 and q.denominator == 1, nonneg)
        if tau == 0:
            record("round-trip", err == 0)
        if n < N:
            q2 = t.q(n + 1)
            h2 = Fraction(m) ** digits[n]
            record("determinant",
                   t.p(n) * q2 - t.p(n + 1) * q == (-1) ** (n + 1) * Fraction(m) ** S)
            lt = Fraction(m) ** S / (q * (q2 + (m - 1) * h2 * q))
            lp = Fraction(m) ** S / (q * (q2 + (m - 1) ** (n + 1) * h2 * q))
            ut = Fraction(m) ** S / (q * q2)
            record("bounds-sandwich", lp <= lt < abs(err) <= ut)
            record("upper-bound-fib-power", abs(err) < 1 / max(Fraction(fibonacci(n)), Fraction(m) ** S), nonneg)
            record("ceiling", abs(err) <= 1 / q2)
            if n >= 2:
                record("p-fibonacci-floor", t.p(n + 1) >= fibonacci(n + 1), nonneg and digits[n] >= 0)
    record("finite-expansion", e.terminated)
    return out


def kernel_failures(x, m, cap):
    r = sweep_rational(x, m, cap, detect_cycles=False)
    return {c: [t.checked, t.failed, t.outside] for c, t in r.tallies.items()}, r


@pytest.mark.parametrize("x, m", [
    (Fraction(2, 5), 3), (Fraction(7, 11), 2), (Fraction(1, 115), 5), (Fraction(3, 2), 3),
    (Fraction(15, 4), 5), (Fraction(9, 1), 10), (Fraction(5, 7), 6),
])
def test_kernel_agrees_with_fractions(x, m):
    got, report = kernel_failures(x, m, 80)
    assert got == reference_failures(x, m, 80)
    assert list(report.digits) == list(expand(x, m, 80).digits)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 10), st.integers(1, 300), st.integers(1, 300))
def test_kernel_agrees_with_fractions_random(m, p, q):
    x = Fraction(p, q)
    if x > m - 1:
        x = (m - 1) / x
    got, _ = kernel_failures(x, m, 40)
    assert got == reference_failures(x, m, 40)


def test_kernel_without_rows_matches_full_kernel():
    light = ["reconstruction", "round-trip", "finite-expansion"]
    for x, m in [(Fraction(1, 115), 5), (Fraction(3, 7), 4), (Fraction(22, 7), 7)]:
        a = sweep_rational(x, m, 500, claims=light)
        b = sweep_rational(x, m, 500, claims=light + ["error-formula"])
        for c in light:
            assert (a.tallies[c].checked, a.tallies[c].failed) == (b.tallies[c].checked, b.tallies[c].failed)


def test_cycle_detection():
    r = sweep_rational(Fraction(1, 7), 5, 5000)
    assert r.cycle is not None and not r.capped and not r.terminated
    start, period = r.cycle
    e = expand(Fraction(1, 7), 5, start + 2 * period + 1)
    taus = list(e.iterates())
    assert taus[start] == taus[start + period]
    assert len(set(taus[start:start + period])) == period
    assert r.tallies["finite-expansion"].failed == 1


def test_cycle_recorded_without_stopping():
    r = sweep_rational(Fraction(1, 7), 5, 300, stop_at_cycle=False)
    assert len(r.digits) == 300 and r.capped and r.cycle is not None
    assert r.tallies["reconstruction"].checked == 300


def test_unknown_claim_rejected():
    with pytest.raises(ValueError):
        sweep_rational(Fraction(1, 3), 2, claims=["no-such-claim"])


@given(st.lists(st.integers(0, 2**400), min_size=1, max_size=3),
       st.lists(st.integers(0, 2**400), min_size=1, max_size=3))
def test_compare_matches_exact_products(xs, ys):
    from math import prod
    X, Y = prod(xs), prod(ys)
    assert _compare(xs, ys) == (X > Y) - (X < Y)
    assert _compare(xs, list(reversed(xs))) == 0
