from fractions import Fraction

import pytest

from mcfrac.analysis import (
    audit,
    convergence_diagnostics,
    default_grid,
    error_bounds,
    error_exact,
    q_floors,
)
from mcfrac.convergents import build_table
from mcfrac.expansion import PrecisionExhausted, expand
from mcfrac.numeric import interval_from_sqrt


@pytest.mark.parametrize("x, m, n, expected", [
    (Fraction(7, 11), 2, 1, Fraction(-4, 11)),
    (Fraction(2, 5), 3, 1, Fraction(-3, 5)),
    (Fraction(7, 11), 2, 5, Fraction(0)),
])
def test_error_exact(x, m, n, expected):
    e = expand(x, m)
    assert error_exact(x, e, None, n) == expected


def test_bounds_row_for_seven_elevenths():
    e = expand(Fraction(7, 11), 2)
    row = error_bounds(None, e, 1)
    assert row.error == Fraction(-4, 11)
    assert (row.lower_tight, row.upper_tight, row.upper_coarse) == (Fraction(1, 3), Fraction(1, 2), 1)
    assert row.lower_weak == Fraction(1, 3)
    assert row.sign_ok and row.sandwich_ok


def test_bounds_at_terminal_depth_are_not_applicable():
    e = expand(Fraction(7, 11), 2)
    row = error_bounds(None, e, 5)
    assert row.error == 0 and not row.applicable and row.sandwich_ok


def test_bounds_need_the_next_digit():
    e = expand(Fraction(1, 7), 5, 3)
    with pytest.raises(ValueError):
        error_bounds(None, e, 3)


@pytest.mark.parametrize("x, m", [(Fraction(13, 97), 2), (Fraction(2, 5), 3), (Fraction(41, 29), 5)])
def test_every_depth_obeys_the_sandwich(x, m):
    e = expand(x, m, 60)
    table = build_table(e.digits, m)
    last = len(e.digits) if e.terminated else len(e.digits) - 1
    for n in range(1, last + 1):
        row = error_bounds(table, e, n)
        assert row.sign_ok and row.sandwich_ok


def test_q_floors():
    assert q_floors(build_table([1, 1], 2), 2) == (True, True)
    assert q_floors(build_table([0, -1, 0], 3), 3) == (True, False)
    assert q_floors(build_table([0, -1, 0], 3), 0) == (True, True)


def test_diagnostics_for_sqrt2_in_base_two():
    rows = convergence_diagnostics(interval_from_sqrt(2, 256) - 1, 2, 30)
    assert len(rows) == 30
    assert all(r.certified for r in rows)


def test_diagnostics_for_terminating_rational():
    rows = convergence_diagnostics(Fraction(7, 11), 2, 5)
    assert rows[-1].error.hi == 0 and rows[-1].certified


def test_diagnostics_report_exhaustion():
    with pytest.raises(PrecisionExhausted):
        convergence_diagnostics(interval_from_sqrt(2, 16) - 1, 2, 40)


def test_audit_small_grid_base_two():
    grid = [Fraction(p, q) for q in range(1, 61) for p in range(1, q + 1)]
    report = audit(grid, [2], depth=100)
    for claim in ("determinant", "reconstruction", "error-formula", "q-power-floor"):
        assert report.entry(claim, 2).status == "verified"
    assert not report.regression


def test_audit_finds_fibonacci_counterexample():
    report = audit([Fraction(2, 5)], [3])
    entry = report.entry("q-fibonacci-floor", 3)
    assert entry.status == "conditionally-verified"
    witness = next(w for w in entry.witnesses if w["n"] == 3)
    assert witness["digits"] == [0, -1, 0]
    assert "5/3" in witness["detail"]
    assert not report.regression


def test_audit_empty():
    report = audit([], [2, 3])
    assert report.entries == [] and not report.regression


def test_audit_skips_out_of_domain_inputs():
    report = audit([Fraction(3, 2)], [2, 3])
    assert report.skipped == 1
    assert report.entry("round-trip", 3).checked == 1


def test_audit_interval_inputs():
    report = audit([interval_from_sqrt(2, 256) - 1], [2], depth=40)
    assert report.entry("ceiling", 2).status == "verified"
    assert report.findings["intervals_precision_exhausted"] == 0


def test_default_grid_is_deterministic():
    a = default_grid(10, 50, seed=3)
    assert a == default_grid(10, 50, seed=3)
    assert len(set(a)) == len(a)
    assert a != default_grid(10, 50, seed=4)
