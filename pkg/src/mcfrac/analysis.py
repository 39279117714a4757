"""Error formula, two-sided error bounds, floors on q_n and a claim auditor."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .convergents import ConvergentTable, build_table, determinant
from .expansion import Expansion, NumberInput, PrecisionExhausted, _power, expand
from .numeric import PrecisionInterval, check_base, fibonacci
from .sweep import CLAIMS, CONDITIONS, sweep_rational

__all__ = [
    "InternalInconsistency",
    "BoundsRow",
    "DiagnosticRow",
    "AuditEntry",
    "AuditReport",
    "error_exact",
    "error_bounds",
    "q_floors",
    "convergence_diagnostics",
    "audit",
    "default_grid",
]


class InternalInconsistency(AssertionError):
    """Two independent evaluations of the same exact quantity disagree."""


def _require_exact(expansion: Expansion) -> Fraction:
    if not expansion.exact:
        raise TypeError("exact error analysis needs a rational input")
    return expansion.source


def _table_for(table: ConvergentTable | None, expansion: Expansion, rows: int) -> ConvergentTable:
    if table is not None and table.depth >= rows and table.digits == tuple(expansion.digits[:table.depth]):
        return table
    return build_table(expansion.digits, expansion.base, rows)


def error_exact(x, expansion: Expansion, table: ConvergentTable | None, n: int) -> Fraction:
    """x - w_n, computed by direct subtraction and by the closed form; both must agree."""
    x = Fraction(x)
    if x != _require_exact(expansion):
        raise ValueError("expansion was not produced from x")
    if not 1 <= n <= len(expansion.digits):
        raise IndexError(f"depth {n} outside 1..{len(expansion.digits)}")
    table = _table_for(table, expansion, n)
    m = expansion.base
    tau = expansion.iterate(n)
    direct = x - table.omega(n)
    q_n, q_prev = table.q(n), table.q(n - 1)
    closed = ((-1) ** n * tau * _power(m, table.exponent_sum(n))
              / (q_n * (q_n + tau * _power(m, table.digit(n)) * q_prev)))
    if direct != closed:
        raise InternalInconsistency(f"x - w_{n}: direct {direct} != closed form {closed}")
    return direct


@dataclass(frozen=True)
class BoundsRow:
    n: int
    error: Fraction
    tau: Fraction
    q_floor_power: Fraction
    q_floor_fib: int
    lower_tight: Fraction | None = None
    lower_weak: Fraction | None = None
    upper_tight: Fraction | None = None
    upper_coarse: Fraction | None = None

    @property
    def applicable(self) -> bool:
        return self.lower_tight is not None

    @property
    def sign_ok(self) -> bool:
        expected = (-1) ** self.n * (self.tau > 0) - (-1) ** self.n * (self.tau < 0)
        actual = (self.error > 0) - (self.error < 0)
        return actual == expected

    @property
    def sandwich_ok(self) -> bool:
        if not self.applicable:
            return self.error == 0
        e = abs(self.error)
        return self.lower_weak <= self.lower_tight < e <= self.upper_tight


def error_bounds(table: ConvergentTable | None, expansion: Expansion, n: int) -> BoundsRow:
    """Error at depth n together with the lower and upper bounds on it.

    ``lower_weak`` carries the coarser factor (m-1)**(n+1); ``lower_tight``
    uses (m-1) since the remainder stays below m-1. Both upper bounds drop
    the tail term. Rows at the terminal depth of a finite expansion have
    error 0 and no bounds.
    """
    x = _require_exact(expansion)
    m = expansion.base
    if not 1 <= n <= len(expansion.digits):
        raise IndexError(f"depth {n} outside 1..{len(expansion.digits)}")
    tau = expansion.iterate(n)
    rows = min(n + 1, len(expansion.digits))
    table = _table_for(table, expansion, rows)
    error = error_exact(x, expansion, table, n)
    exp_sum = table.exponent_sum(n)
    power_floor = _power(m, exp_sum)
    fib = fibonacci(n)
    if tau == 0:
        return BoundsRow(n, error, tau, power_floor, fib)
    if n + 1 > len(expansion.digits):
        raise ValueError(f"digit b_{n + 1} was not computed; expand further")
    q_n, q_next = table.q(n), table.q(n + 1)
    h = _power(m, table.digit(n + 1))
    lower_tight = power_floor / (q_n * (q_next + (m - 1) * h * q_n))
    lower_weak = power_floor / (q_n * (q_next + (m - 1) ** (n + 1) * h * q_n))
    upper_tight = power_floor / (q_n * q_next)
    upper_coarse = 1 / max(Fraction(fib), power_floor)
    return BoundsRow(n, error, tau, power_floor, fib, lower_tight, lower_weak, upper_tight, upper_coarse)


def q_floors(table: ConvergentTable, n: int) -> tuple[bool, bool]:
    """(q_n >= m**(b_1+...+b_n), q_n >= F_n)."""
    if not 0 <= n <= table.depth:
        raise IndexError(f"row {n} outside 0..{table.depth}")
    q = table.q(n)
    return q >= _power(table.base, table.exponent_sum(n)), q >= fibonacci(n)


@dataclass(frozen=True)
class DiagnosticRow:
    n: int
    error: PrecisionInterval       # enclosure of |x - w_n|
    ceiling: Fraction | None       # 1/q_{n+1}; None at the last digit of a finite expansion

    @property
    def certified(self) -> bool:
        """Whether the whole enclosure lies under the ceiling."""
        if self.ceiling is None:
            return self.error.hi == 0
        return self.error.hi <= self.ceiling


def convergence_diagnostics(x: NumberInput, m: int, depth: int) -> list[DiagnosticRow]:
    """Certified |x - w_n| and the ceiling 1/q_{n+1} for n = 1..depth."""
    check_base(m)
    if depth < 1:
        raise ValueError("depth must be positive")
    expansion = expand(x, m, depth + 1)
    digits = expansion.digits
    if not digits:
        return []
    table = build_table(digits, m)
    if isinstance(x, PrecisionInterval):
        lo, hi, prec = x.lo, x.hi, x.precision
        if len(digits) < depth + 1 and not expansion.terminated:
            raise PrecisionExhausted(expansion)
    else:
        lo = hi = Fraction(x)
        prec = 64
    rows = []
    for n in range(1, min(depth, len(digits)) + 1):
        w = table.omega(n)
        a, b = lo - w, hi - w
        enclosure = abs(PrecisionInterval(a, b, prec))
        ceiling = 1 / table.q(n + 1) if n + 1 <= table.depth else None
        rows.append(DiagnosticRow(n, enclosure, ceiling))
    return rows


# --------------------------------------------------------------------------
# audit


@dataclass
class AuditEntry:
    claim: str
    statement: str
    base: int
    status: str
    alarm: bool
    condition: str | None
    checked: int
    failures: int
    outside_condition: int
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "claim": self.claim,
            "statement": self.statement,
            "base": self.base,
            "status": self.status,
            "alarm": self.alarm,
            "condition": self.condition,
            "checked": self.checked,
            "failures": self.failures,
            "outside_condition": self.outside_condition,
            "witnesses": self.witnesses,
        }


@dataclass
class AuditReport:
    entries: list
    inputs: int = 0
    skipped: int = 0
    findings: dict = field(default_factory=dict)

    @property
    def regression(self) -> bool:
        """True when a claim that must hold everywhere was violated."""
        return any(e.alarm and e.status == "violated" for e in self.entries)

    def entry(self, claim: str, base: int) -> AuditEntry:
        for e in self.entries:
            if e.claim == claim and e.base == base:
                return e
        raise KeyError((claim, base))

    def as_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "skipped": self.skipped,
            "findings": self.findings,
            "regression": self.regression,
            "entries": [e.as_dict() for e in self.entries],
        }


def _status(checked: int, failures: int, outside: int) -> str:
    if failures:
        return "violated"
    if outside:
        return "conditionally-verified"
    if not checked:
        return "not-checked"
    return "verified"


def _label(x) -> str:
    if isinstance(x, PrecisionInterval):
        return f"[{x.lo}, {x.hi}]@{x.precision}"
    return str(Fraction(x))


def _interval_tallies(x: PrecisionInterval, m: int, depth: int, max_witnesses: int):
    """Checks that need only certified digits: table identities and the ceiling."""
    tallies = {c: [0, 0, 0, []] for c in ("determinant", "ceiling", "q-fibonacci-floor",
                                          "q-power-floor", "digit-domain")}

    def record(claim, ok, n, detail, inside=True):
        t = tallies[claim]
        t[0] += 1
        if not ok:
            t[1 if inside else 2] += 1
            if len(t[3]) < max_witnesses:
                t[3].append({"n": n, "inside_condition": inside, "detail": detail})

    try:
        expansion = expand(x, m, depth + 1)
        exhausted = False
    except PrecisionExhausted as exc:
        expansion, exhausted = exc.expansion, True
    digits = expansion.digits
    if not digits:
        return tallies, digits, exhausted, 0
    table = build_table(digits, m)
    inconclusive = 0
    for n in range(1, table.depth + 1):
        b = table.digit(n)
        record("digit-domain", b >= -1, n, f"digit {b}")
        if n < table.depth:
            det = determinant(table, n)
            want = (-1) ** (n + 1) * _power(m, table.exponent_sum(n))
            record("determinant", det == want, n, "determinant mismatch")
            w = table.omega(n)
            err_hi = max(abs(x.lo - w), abs(x.hi - w))
            err_lo = PrecisionInterval(x.lo - w, x.hi - w).__abs__().lo
            ceiling = 1 / table.q(n + 1)
            if err_lo > ceiling:
                record("ceiling", False, n, "error exceeds 1/q_{n+1}")
            else:
                record("ceiling", True, n, "")
                inconclusive += err_hi > ceiling
        power_ok, fib_ok = q_floors(table, n)
        record("q-power-floor", power_ok, n, "q_n below m^S")
        if n >= 2:
            record("q-fibonacci-floor", fib_ok, n, f"q_{n} = {table.q(n)} < F_{n} = {fibonacci(n)}",
                   all(d >= 0 for d in digits[:n]))
    return tallies, digits, exhausted, inconclusive


def audit(inputs: Sequence[NumberInput], bases: Sequence[int], depth: int = 5000,
          claims: Sequence[str] | None = None, max_witnesses: int = 20,
          detect_cycles: bool = True) -> AuditReport:
    """Sweep every claim over ``inputs`` x ``bases``.

    Rational inputs get the full set of exact checks at every depth; interval
    inputs get the checks that only need certified digits. Inputs outside
    [0, m-1] for a base are skipped for that base.
    """
    inputs = list(inputs)
    selected = list(CLAIMS if claims is None else claims)
    report = AuditReport([], inputs=len(inputs))
    if not inputs:
        return report
    periodic = capped = exhausted_count = inconclusive_total = 0
    for m in bases:
        check_base(m)
        agg = {c: [0, 0, 0, []] for c in selected}
        for x in inputs:
            if isinstance(x, PrecisionInterval):
                if x.lo < 0 or x.hi > m - 1:
                    report.skipped += 1
                    continue
                tallies, digits, exhausted, inconclusive = _interval_tallies(x, m, depth, max_witnesses)
                exhausted_count += exhausted
                inconclusive_total += inconclusive
                items = [(c, t[0], t[1], t[2], t[3]) for c, t in tallies.items() if c in agg]
            else:
                x = Fraction(x)
                if not 0 <= x <= m - 1:
                    report.skipped += 1
                    continue
                orbit = sweep_rational(x, m, depth, selected, detect_cycles, max_witnesses)
                digits = orbit.digits
                periodic += orbit.cycle is not None
                capped += orbit.capped
                items = [(c, t.checked, t.failed, t.outside, t.witnesses) for c, t in orbit.tallies.items()]
            label = _label(x)
            for claim, checked, failed, outside, witnesses in items:
                a = agg[claim]
                a[0] += checked
                a[1] += failed
                a[2] += outside
                for w in witnesses:
                    if len(a[3]) >= max_witnesses:
                        break
                    shown = digits[: w["n"] + 1]
                    a[3].append({"input": label, "base": m, **w,
                                 "digits": list(shown) if len(shown) <= 64 else None})
        for claim in selected:
            checked, failed, outside, witnesses = agg[claim]
            statement, alarm = CLAIMS[claim]
            report.entries.append(AuditEntry(
                claim, statement, m, _status(checked, failed, outside), alarm,
                CONDITIONS.get(claim), checked, failed, outside, witnesses))
    report.findings = {
        "eventually_periodic_rationals": periodic,
        "rationals_hitting_digit_cap": capped,
        "intervals_precision_exhausted": exhausted_count,
        "interval_ceiling_checks_inconclusive": inconclusive_total,
    }
    return report


def default_grid(max_q: int = 60, random_count: int = 10_000, random_max_q: int = 10**6,
                 seed: int = 0, top: int = 9) -> list[Fraction]:
    """All p/q with q <= max_q in (0, top], then seeded random fractions with q <= random_max_q.

    Each base filters the grid down to its own domain [0, m-1].
    """
    from .stats import SplitMix64

    grid = sorted({Fraction(p, q) for q in range(1, max_q + 1) for p in range(1, top * q + 1)})
    seen = set(grid)
    rng = SplitMix64(seed)
    extra = []
    i = 0
    while len(extra) < random_count:
        q = 1 + rng.word(i, 0) % random_max_q
        p = 1 + rng.word(i, 1) % (top * q)
        i += 1
        x = Fraction(p, q)
        if x not in seen:
            seen.add(x)
            extra.append(x)
    return grid + extra
