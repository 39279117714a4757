"""Single-pass integer kernel that checks every convergent identity along an orbit.

The Fraction-based functions in :mod:`mcfrac.convergents` and
:mod:`mcfrac.analysis` are the readable reference. This module re-derives the
same checks with plain integers so that grids of thousands of inputs and
thousands of digits finish in reasonable time.

Scaling: every -1 digit introduces one factor 1/m into p_n and q_n, so
``P_n = p_n * m**K_n`` and ``Q_n = q_n * m**K_n`` are integers, where ``K_n``
counts the -1 digits among b_1..b_n. Each check below is the corresponding
rational identity multiplied through by a positive common denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .numeric import ilog

# claim id -> (statement, alarm)
# ``alarm`` marks claims whose failure on the tested domain is a regression;
# the others are general statements that are known to fail on some inputs.
CLAIMS = {
    "digit-domain": ("every digit is >= -1 and every remainder lies in [0, m-1)", True),
    "finite-expansion": ("a rational input has a finite expansion", False),
    "round-trip": ("a terminated expansion evaluates back to its input", True),
    "determinant": ("p_n q_{n+1} - p_{n+1} q_n = (-1)^(n+1) m^(b_1+...+b_n)", True),
    "reconstruction": ("x = (p_n + t m^b_n p_{n-1}) / (q_n + t m^b_n q_{n-1}) with t = tau^n(x)", True),
    "error-formula": (
        "x - w_n = (-1)^n t m^(b_1+...+b_n) / (q_n (q_n + t m^b_n q_{n-1})) with t = tau^n(x)", True),
    "bounds-sandwich": (
        "lower_weak <= lower_tight < |x - w_n| <= m^(b_1+...+b_n) / (q_n q_{n+1})", True),
    "upper-bound-fib-power": ("|x - w_n| < 1 / max(F_n, m^(b_1+...+b_n))", True),
    "ceiling": ("|x - w_n| <= 1 / q_{n+1}", True),
    "q-fibonacci-floor": ("q_n >= F_n for n >= 2", True),
    "p-fibonacci-floor": ("p_{n+1} >= F_{n+1} for n >= 2", False),
    "q-power-floor": ("q_n >= m^(b_1+...+b_n)", True),
    "integrality": ("p_n and q_n are integers", True),
}

# claims that only bind when the digits involved are all nonnegative
CONDITIONS = {
    "upper-bound-fib-power": "b_1..b_n >= 0",
    "q-fibonacci-floor": "b_1..b_n >= 0",
    "p-fibonacci-floor": "b_1..b_{n+1} >= 0",
    "integrality": "b_1..b_n >= 0",
}


@dataclass
class ClaimTally:
    checked: int = 0
    failed: int = 0          # failures where the claim's condition holds
    outside: int = 0         # failures where the condition does not hold
    witnesses: list = field(default_factory=list)


@dataclass
class OrbitReport:
    """Outcome of sweeping one rational input."""

    x: Fraction
    base: int
    digits: list
    terminated: bool
    cycle: tuple | None      # (start, period) when a remainder repeated
    capped: bool
    tallies: dict


class _Powers(dict):
    def __init__(self, m):
        super().__init__()
        self.m = m

    def __missing__(self, e):
        v = self.m**e
        self[e] = v
        return v


def _bracket(factors) -> tuple[int, int, int]:
    """(lo, hi, e) with lo * 2**e <= product <= hi * 2**e, from the top 64 bits of each factor."""
    lo = hi = 1
    e = 0
    for a in factors:
        shift = a.bit_length() - 64
        if shift > 0:
            a >>= shift
            lo *= a
            hi *= a + 1
            e += shift
        else:
            lo *= a
            hi *= a
    return lo, hi, e


def _compare(xs, ys) -> int:
    """Sign of prod(xs) - prod(ys) for nonnegative integers.

    Leading-bit brackets settle almost every case in linear time; the exact
    products are formed only when the brackets overlap.
    """
    xlo, xhi, xe = _bracket(xs)
    ylo, yhi, ye = _bracket(ys)
    d = xe - ye
    if d > 0:
        if xhi << d < ylo:
            return -1
        if xlo << d > yhi:
            return 1
    else:
        if xhi < ylo << -d:
            return -1
        if xlo > yhi << -d:
            return 1
    x = y = 1
    for a in xs:
        x *= a
    for a in ys:
        y *= a
    return (x > y) - (x < y)


def sweep_rational(x, m: int, cap: int = 5000, claims=None, detect_cycles: bool = True,
                   max_witnesses: int = 20, stop_at_cycle: bool = True) -> OrbitReport:
    """Expand ``x`` exactly and check each selected claim at every depth.

    With ``detect_cycles`` a repeated remainder is recorded: the expansion is
    then eventually periodic and provably never terminates. The run stops
    there unless ``stop_at_cycle`` is false, in which case it goes on to the cap.
    """
    x = Fraction(x)
    selected = set(CLAIMS if claims is None else claims)
    unknown = selected - set(CLAIMS)
    if unknown:
        raise ValueError(f"unknown claims: {sorted(unknown)}")
    tallies = {c: ClaimTally() for c in selected}
    A, C = x.numerator, x.denominator
    if not 0 <= x <= m - 1:
        raise ValueError(f"{x} is outside [0, {m - 1}]")
    digits: list = []
    if A == 0:
        return OrbitReport(x, m, digits, True, None, False, tallies)

    do_dom = "digit-domain" in selected
    do_rt = "round-trip" in selected
    do_det = "determinant" in selected
    do_rec = "reconstruction" in selected
    do_err = "error-formula" in selected
    do_sand = "bounds-sandwich" in selected
    do_coarse = "upper-bound-fib-power" in selected
    do_ceil = "ceiling" in selected
    do_fib_q = "q-fibonacci-floor" in selected
    do_fib_p = "p-fibonacci-floor" in selected
    do_pow = "q-power-floor" in selected
    do_int = "integrality" in selected
    deferred = do_det or do_sand or do_coarse or do_ceil or do_fib_p
    # rows p_n, q_n are only materialised when a claim reads them; otherwise
    # the error numerators follow the same recurrence on their own
    rows = deferred or do_err or do_pow or do_fib_q or do_int
    powers = do_det or do_err or do_sand or do_coarse or do_pow
    fib = do_coarse or do_fib_q or do_fib_p

    pw = _Powers(m)
    m1 = m - 1

    def fail(claim, n, detail, inside=True):
        t = tallies[claim]
        if inside:
            t.failed += 1
        else:
            t.outside += 1
        if len(t.witnesses) < max_witnesses:
            text = detail() if callable(detail) else detail
            t.witnesses.append({"n": n, "inside_condition": inside, "detail": text})

    u, v = A, C                 # tau^(n-1) = u/v
    P0, Q0 = 1, 0               # row n-2 (row -1 seeds the recurrence)
    P1, Q1 = 0, 1               # row n-1
    bprev = 0
    D = 1                       # m**K
    W = 1                       # m**(S + 2K), S = b_1 + ... + b_n
    V = 1                       # m**(S + K)
    F_prev, F = 0, 1            # F_{n-1}, F_n with F_0 = F_1 = 1
    nonneg = True
    pm1 = m1                    # (m-1)**(n+1), advanced per depth
    cycle = None
    # Brent: compare against a checkpoint refreshed at powers of two
    mark_u, mark_v, mark_n, power = u, v, 0, 1
    prev = None                 # data of depth n-1 for checks that need row n
    NE_prev2 = A * Q0 - C * P0  # A q_{n-2} - C p_{n-2}, scaled like row n-1
    NE_prev = A * Q1 - C * P1   # A q_{n-1} - C p_{n-1}, scaled like row n-1
    Wn = Vn = Qn = None

    n = 0
    while u and n < cap:
        n += 1
        # one shift-map step in integers
        # u/v is reduced, so the gcd only involves the small factor m or m**b
        if v < u:
            b = -1
            g = gcd(m, u)
            top, bot = m * v - u, u
        else:
            q = v // u
            b = 0 if q < m else ilog(q, m)
            scale = pw[b]
            g = gcd(v, scale) if b else 1
            top, bot = v - u * scale, u * scale
        if g == 1:
            u2, v2 = top, bot
        else:
            u2, v2 = top // g, bot // g
        digits.append(b)

        s = 1 if b < 0 else 0
        lead = pw[b + s]
        trail_e = bprev + s
        if trail_e >= 0:
            trail = pw[trail_e]
            if rows:
                Pn = lead * P1 + trail * P0
                Qn = lead * Q1 + trail * Q0
            else:
                NE = lead * NE_prev + trail * NE_prev2
        else:
            if rows:
                Pn = lead * P1 + P0 // m
                Qn = lead * Q1 + Q0 // m
            else:
                NE = lead * NE_prev + NE_prev2 // m
        if s:
            if rows:
                P1s, Q1s = P1 * m, Q1 * m
            Dn = D * m
        else:
            if rows:
                P1s, Q1s = P1, Q1
            Dn = D
        if powers:
            Wn = W * pw[b + 2 * s]
            Vn = V * pw[b + s]
        if fib:
            F_prev, F = F, F + F_prev
        nonneg_n = nonneg and b >= 0

        # checks at depth n-1 that need row n
        if deferred and prev is not None:
            k, NEk, Qk, Wk, Vk, Dk, Fk, nnk, pm1k = prev
            if do_det:
                tallies["determinant"].checked += 1
                det = P1s * Qn - Pn * Q1s
                rhs = Wk * pw[2 * s]
                if det != (rhs if k % 2 else -rhs):
                    fail("determinant", k, "determinant mismatch")
            absNE = -NEk if NEk < 0 else NEk
            if do_sand:
                tallies["bounds-sandwich"].checked += 1
                hn, hd = (1, m) if b < 0 else (pw[b], 1)
                G = Qn * hd + m1 * hn * Q1s
                # the two lower bounds differ only in (m-1)**(n+1) against m-1,
                # multiplied by the same nonnegative h q_n
                lhs = Wk * pw[s] * C
                ok = (pm1k >= m1 and _compare((lhs, hd), (absNE, G)) < 0
                      and _compare((absNE, Qn), (lhs,)) <= 0)
                if not ok:
                    fail("bounds-sandwich", k, "bounds sandwich broken")
            if do_ceil:
                tallies["ceiling"].checked += 1
                if _compare((absNE, Qn), (C, Qk, Dn)) > 0:
                    fail("ceiling", k, "error exceeds 1/q_{n+1}")
            if do_coarse:
                tallies["upper-bound-fib-power"].checked += 1
                # |error| * max(F_n, m^S) >= 1 with every term scaled to integers
                if (_compare((absNE, Fk), (C, Qk)) >= 0
                        or _compare((absNE, Vk), (C, Qk, Dk)) >= 0):
                    fail("upper-bound-fib-power", k, "error not below 1/max(F_n, m^S)", nnk)
            if do_fib_p and k >= 2:
                tallies["p-fibonacci-floor"].checked += 1
                if _compare((Pn,), (F, Dn)) < 0:
                    fail("p-fibonacci-floor", k,
                         lambda: f"p_{k + 1} = {Fraction(Pn, Dn)} < F_{k + 1} = {F}", nonneg_n)

        # checks at depth n
        if do_dom:
            tallies["digit-domain"].checked += 1
            if b < -1 or u2 < 0 or u2 >= m1 * v2:
                fail("digit-domain", n, lambda: f"digit {b}, remainder {Fraction(u2, v2)}")
        if rows:
            NE = A * Qn - C * Pn
        NE1 = NE_prev * m if s else NE_prev
        if do_rec or do_err:
            gn, gd = (1, m) if b < 0 else (pw[b], 1)
            vg, ug = v2 * gd, u2 * gn
            if do_rec:
                # A*L - C*R with L, R the denominator and numerator of the Moebius form
                tallies["reconstruction"].checked += 1
                if NE * vg + ug * NE1:
                    fail("reconstruction", n, "Moebius form does not reproduce x")
            if do_err:
                tallies["error-formula"].checked += 1
                L = Qn * vg + ug * Q1s
                closed = u2 * gd * C * Wn
                if NE * L != (-closed if n % 2 else closed):
                    fail("error-formula", n, "closed form differs from x - w_n")
        if do_pow:
            tallies["q-power-floor"].checked += 1
            if Qn < Vn:
                fail("q-power-floor", n, "q_n below m^S")
        if do_fib_q and n >= 2:
            tallies["q-fibonacci-floor"].checked += 1
            if _compare((Qn,), (F, Dn)) < 0:
                fail("q-fibonacci-floor", n, lambda: f"q_{n} = {Fraction(Qn, Dn)} < F_{n} = {F}", nonneg_n)
        if do_int:
            tallies["integrality"].checked += 1
            if Dn > 1 and (Pn % Dn or Qn % Dn):
                fail("integrality", n,
                     lambda: f"p_{n} = {Fraction(Pn, Dn)}, q_{n} = {Fraction(Qn, Dn)}", nonneg_n)
        if do_rt and u2 == 0:
            tallies["round-trip"].checked += 1
            if NE:
                fail("round-trip", n, "w_N differs from x")

        NE_prev2, NE_prev = NE1, NE
        if deferred:
            prev = (n, NE, Qn, Wn, Vn, Dn, F, nonneg_n, pm1 * m1)
        if do_sand:
            pm1 *= m1
        if rows:
            P0, Q0, P1, Q1 = P1s, Q1s, Pn, Qn
        if powers:
            W, V = Wn, Vn
        D, nonneg, bprev = Dn, nonneg_n, b
        u, v = u2, v2
        if detect_cycles and u and cycle is None:
            if u == mark_u and v == mark_v:
                cycle = (None, n - mark_n)
                if stop_at_cycle:
                    break
            if n - mark_n == power:
                mark_u, mark_v, mark_n, power = u, v, n, 2 * power

    if cycle is not None:
        cycle = (_cycle_start(A, C, m, cycle[1]), cycle[1])
    terminated = u == 0
    capped = not terminated and n >= cap and not (cycle and stop_at_cycle)
    if "finite-expansion" in selected:
        t = tallies["finite-expansion"]
        t.checked += 1
        if not terminated:
            detail = (f"eventually periodic: remainder after {cycle[0]} digits recurs with period {cycle[1]}"
                      if cycle else f"no termination within {cap} digits")
            fail("finite-expansion", n, detail)
    return OrbitReport(x, m, digits, terminated, cycle, capped, tallies)


def _cycle_start(a: int, c: int, m: int, period: int) -> int:
    """First index at which the remainder sequence of a/c enters its cycle."""

    def advance(num, den):
        if den < num:
            top, bot = m * den - num, num
        else:
            q = den // num
            scale = m ** (0 if q < m else ilog(q, m))
            top, bot = den - num * scale, num * scale
        g = gcd(top, bot)
        return top // g, bot // g

    lead = (a, c)
    for _ in range(period):
        lead = advance(*lead)
    trail = (a, c)
    start = 0
    while trail != lead:
        trail, lead = advance(*trail), advance(*lead)
        start += 1
    return start
