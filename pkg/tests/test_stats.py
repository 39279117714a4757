from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mcfrac.stats import (
    NO_REFERENCE_BANNER,
    SplitMix64,
    gauss_kuzmin_empirical,
    mcf_digit_histogram,
    rcf_evaluate,
    rcf_expand,
)


def test_splitmix_reference_values():
    # standard SplitMix64 with state 0: the first outputs of the sequential generator
    state = 0
    expected = []
    for _ in range(3):
        state = (state + 0x9E3779B97F4A7C15) & (2**64 - 1)
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (2**64 - 1)
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (2**64 - 1)
        expected.append(z ^ (z >> 31))
    assert expected[0] == 0xE220A8397B1DCDAF
    from mcfrac.stats import _mix64
    assert [_mix64(((j + 1) * 0x9E3779B97F4A7C15) & (2**64 - 1)) for j in range(3)] == expected


def test_words_depend_only_on_indices():
    rng = SplitMix64(42)
    a = [rng.word(i, j) for i in range(5) for j in range(3)]
    b = [SplitMix64(42).word(i, j) for i in reversed(range(5)) for j in range(3)]
    assert sorted(a) == sorted(b) and len(set(a)) == 15
    assert SplitMix64(43).word(0) != rng.word(0)


@pytest.mark.parametrize("x, quotients", [
    (Fraction(3, 10), (3, 3)),
    (Fraction(1, 2), (2,)),
    (Fraction(7, 11), (1, 1, 1, 3)),
])
def test_rcf_examples(x, quotients):
    r = rcf_expand(x)
    assert r.quotients == quotients and r.terminated


def test_rcf_round_trip_small_denominators():
    for q in range(2, 201):
        for p in range(1, q):
            x = Fraction(p, q)
            r = rcf_expand(x)
            assert r.terminated and all(a >= 1 for a in r.quotients)
            assert rcf_evaluate(r.quotients) == x


def test_rcf_domain():
    with pytest.raises(ValueError):
        rcf_expand(Fraction(1))


def test_gauss_kuzmin_edges():
    rows = gauss_kuzmin_empirical(500, 3, [Fraction(0), Fraction(1)], 5)
    assert rows[0].reference == 0 and rows[1].reference == 1
    assert rows[1].empirical == 1
    assert rows[0].empirical <= Fraction(1, 100)


def test_gauss_kuzmin_single_sample():
    rows = gauss_kuzmin_empirical(1, 0, [Fraction(k, 10) for k in range(1, 10)], 1)
    assert len(rows) == 9 and all(r.empirical in (0, 1) for r in rows)


def test_gauss_kuzmin_half():
    row, = gauss_kuzmin_empirical(10**5, 8, [Fraction(1, 2)], 7)
    assert abs(float(row.empirical) - 0.58496) <= 0.01


@given(st.integers(2, 7), st.integers(0, 2**32))
def test_histogram_normalised(m, seed):
    h = mcf_digit_histogram(m, 20, 5, seed, digit_cap=4)
    assert h.total == 100
    assert sum(h.frequencies) == 1
    assert len(h.labels) == len(h.counts) == 7
    assert h.banner == NO_REFERENCE_BANNER


def test_histogram_deterministic():
    a = mcf_digit_histogram(3, 200, 10, 1)
    assert a == mcf_digit_histogram(3, 200, 10, 1)
    assert a != mcf_digit_histogram(3, 200, 10, 2)


def test_histogram_base_two_has_no_minus_one():
    # remainders of base 2 stay in [0, 1), so only the first digit could be -1,
    # and the first sample point is drawn from (0, 1)
    assert mcf_digit_histogram(2, 200, 10, 0).counts[0] == 0
