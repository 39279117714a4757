"""Regular continued fractions, the Gauss-Kuzmin check and a digit histogram.

Random numbers come from :class:`SplitMix64` used as a counter-based
generator: the word for (sample i, draw j) depends only on the seed, i and j,
so results do not depend on evaluation order or on how work is split up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .expansion import PrecisionExhausted, _expand_interval
from .numeric import PrecisionInterval, check_base

__all__ = [
    "SplitMix64",
    "RcfExpansion",
    "rcf_expand",
    "rcf_evaluate",
    "GaussKuzminRow",
    "gauss_kuzmin_empirical",
    "HistogramResult",
    "mcf_digit_histogram",
    "NO_REFERENCE_BANNER",
]

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

NO_REFERENCE_BANNER = "no reference values: exploratory digit frequencies only"


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 finaliser applied to a Weyl sequence, indexed by (stream, draw).

    ``word(i, j)`` is the j-th 64-bit word of stream i. Stream i has sub-seed
    ``mix(seed + (i+1) * GAMMA)``; its j-th word is ``mix(subseed + (j+1) * GAMMA)``,
    everything modulo 2**64.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64

    def subseed(self, i: int) -> int:
        return _mix64((self.seed + (i + 1) * GAMMA) & MASK64)

    def word(self, i: int, j: int = 0) -> int:
        return _mix64((self.subseed(i) + (j + 1) * GAMMA) & MASK64)


# --------------------------------------------------------------------------
# regular continued fractions


@dataclass(frozen=True)
class RcfExpansion:
    quotients: tuple
    terminated: bool


def rcf_expand(x, max_terms: int = 10_000) -> RcfExpansion:
    """Partial quotients of x in (0, 1) under the Gauss map 1/x - floor(1/x)."""
    x = Fraction(x)
    if not 0 < x < 1:
        raise ValueError(f"{x} is outside (0, 1)")
    if max_terms < 1:
        raise ValueError("max_terms must be positive")
    num, den = x.numerator, x.denominator
    quotients = []
    while num and len(quotients) < max_terms:
        a, r = divmod(den, num)
        quotients.append(a)
        num, den = r, num
    return RcfExpansion(tuple(quotients), num == 0)


def rcf_evaluate(quotients: Sequence[int]) -> Fraction:
    """[0; a_1, ..., a_k] as an exact fraction."""
    value = Fraction(0)
    for a in reversed(quotients):
        if a < 1:
            raise ValueError("partial quotients must be positive")
        value = 1 / (a + value)
    return value


@dataclass(frozen=True)
class GaussKuzminRow:
    z: Fraction
    empirical: Fraction
    reference: float


def gauss_kuzmin_empirical(samples: int, n: int, z_grid: Sequence, seed: int) -> list[GaussKuzminRow]:
    """Fraction of uniform samples with tau^n(x) <= z, next to log2(z + 1).

    Sample i is the dyadic midpoint (2w + 1) / 2**65 for the 64-bit word w of
    stream i. The Gauss map is then applied exactly, as Euclid steps on
    numerator and denominator; once a sample hits 0 it stays there.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    grid = [Fraction(z) for z in z_grid]
    for z in grid:
        if not 0 <= z <= 1:
            raise ValueError(f"grid point {z} is outside [0, 1]")
    rng = SplitMix64(seed)
    counts = [0] * len(grid)
    den0 = 1 << 65
    for i in range(samples):
        num, den = 2 * rng.word(i) + 1, den0
        for _ in range(n):
            if not num:
                break
            num, den = den % num, num
        for k, z in enumerate(grid):
            if num * z.denominator <= z.numerator * den:
                counts[k] += 1
    return [GaussKuzminRow(z, Fraction(c, samples), math.log2(z + 1)) for z, c in zip(grid, counts)]


# --------------------------------------------------------------------------
# digit histogram


@dataclass(frozen=True)
class HistogramResult:
    base: int
    samples: int
    depth: int
    seed: int
    digit_cap: int
    counts: tuple            # counts for digits -1..digit_cap, then the overflow bucket
    banner: str = NO_REFERENCE_BANNER

    @property
    def labels(self) -> list[str]:
        return [str(d) for d in range(-1, self.digit_cap + 1)] + [f">{self.digit_cap}"]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def frequencies(self) -> list[Fraction]:
        total = self.total
        return [Fraction(c, total) for c in self.counts]


def _sample_digits(rng: SplitMix64, i: int, m: int, depth: int, max_words: int) -> tuple:
    """``depth`` certified digits of a uniform point of (0, m - 1).

    The point is pinned to [(m-1)k/2**P, (m-1)(k+1)/2**P] where k collects P
    random bits; whenever a digit boundary falls inside that enclosure another
    64 bits are drawn and the expansion restarts from the narrower interval.
    """
    k = 0
    for words in range(1, max_words + 1):
        k = (k << 64) | rng.word(i, words - 1)
        bits = 64 * words
        scale = Fraction(m - 1, 1 << bits)
        enclosure = PrecisionInterval(k * scale, (k + 1) * scale, bits + 64)
        try:
            return _expand_interval(enclosure, m, depth).digits
        except PrecisionExhausted as exc:
            if words == max_words:
                raise exc
    raise AssertionError("unreachable")


def mcf_digit_histogram(m: int, samples: int, depth: int, seed: int, digit_cap: int = 10,
                        max_words: int = 64) -> HistogramResult:
    """Frequencies of the digits at positions 1..depth over uniform samples of (0, m - 1)."""
    check_base(m)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if digit_cap < -1:
        raise ValueError("digit_cap must be at least -1")
    rng = SplitMix64(seed)
    counts = [0] * (digit_cap + 3)
    for i in range(samples):
        for b in _sample_digits(rng, i, m, depth, max_words):
            counts[b + 1 if b <= digit_cap else -1] += 1
    return HistogramResult(m, samples, depth, seed, digit_cap, tuple(counts))
