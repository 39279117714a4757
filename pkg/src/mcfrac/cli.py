"""Command-line front end.

Exit codes: 0 success, 2 input or domain error, 3 precision exhausted (the
certified prefix is still printed), 4 an unconditional claim was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from typing import Sequence

from .analysis import audit, default_grid, error_bounds, q_floors
from .convergents import build_table, determinant
from .expansion import DomainError, Expansion, PrecisionExhausted, _power, default_max_digits, expand
from .numeric import PrecisionInterval, interval_from_sqrt
from .stats import gauss_kuzmin_empirical, mcf_digit_histogram, rcf_expand

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EXHAUSTED = 3
EXIT_REGRESSION = 4

MIN_PRECISION = 16

_UNSIGNED = r"(?:\d+/\d+|\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
_RATIONAL_RE = re.compile(rf"[+-]?{_UNSIGNED}")
_SQRT_RE = re.compile(rf"sqrt\((\d+)\)(?:/(\d+))?(?:([+-])({_UNSIGNED}))?")


class InputError(ValueError):
    """A command-line value that cannot be parsed or is out of range."""


# --------------------------------------------------------------------------
# input grammar


def parse_rational(text: str) -> Fraction:
    """Integer, p/q or decimal literal, read exactly."""
    text = text.strip()
    if not _RATIONAL_RE.fullmatch(text):
        raise InputError(f"not a rational literal: {text!r}")
    if "/" in text and ("e" in text.lower() or "." in text):
        raise InputError(f"not a rational literal: {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}: {exc}") from None


def parse_number(text: str, precision: int | None):
    """A rational, or an enclosure for ``sqrt(n)``, ``sqrt(n)/d`` or either followed by ``+r``/``-r``."""
    compact = text.replace(" ", "")
    match = _SQRT_RE.fullmatch(compact)
    if match is None:
        return parse_rational(compact)
    if precision is None:
        raise InputError("sqrt(...) input needs --precision")
    value = interval_from_sqrt(int(match.group(1)), precision)
    if match.group(2):
        d = int(match.group(2))
        if d == 0:
            raise InputError("division by zero in input")
        value = value / d
    if match.group(3):
        shift = parse_rational(match.group(4))
        value = value + shift if match.group(3) == "+" else value - shift
    return value


# --------------------------------------------------------------------------
# serialisation


def rational_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def interval_json(x: PrecisionInterval) -> dict:
    return {"lo": rational_json(x.lo), "hi": rational_json(x.hi), "precision": x.precision}


def value_json(x):
    if isinstance(x, PrecisionInterval):
        return interval_json(x)
    return rational_json(x)


def rational_text(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_text(x: Fraction, digits: int = 20) -> str:
    """x rounded toward zero to ``digits`` places after the point, computed exactly."""
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    scaled = abs(x.numerator) * 10**digits // x.denominator
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def value_text(x) -> str:
    if isinstance(x, PrecisionInterval):
        if x.is_point:
            return rational_text(x.lo)
        return f"[{decimal_text(x.lo)}, {decimal_text(x.hi)}]"
    return rational_text(x)


def _maybe(x, fn):
    return None if x is None else fn(x)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# --------------------------------------------------------------------------
# commands


def _expansion_of(args, x) -> tuple[Expansion, bool]:
    try:
        return expand(x, args.base, args.max_digits), False
    except PrecisionExhausted as exc:
        return exc.expansion, True


def _check_domain(x, m: int) -> None:
    lo, hi = (x.lo, x.hi) if isinstance(x, PrecisionInterval) else (x, x)
    if lo < 0 or hi > m - 1:
        raise DomainError(f"{value_text(x)} is outside [0, {m - 1}] for base {m}")


def cmd_expand(args) -> tuple[str, int]:
    x = parse_number(args.number, args.precision)
    _check_domain(x, args.base)
    expansion, exhausted = _expansion_of(args, x)
    if args.format == "json":
        out = _json({
            "command": "expand",
            "input": args.number,
            "base": args.base,
            "digits": list(expansion.digits),
            "terminated": expansion.terminated,
            "remainder": value_json(expansion.remainder),
            "precision_exhausted": exhausted,
        })
    elif args.format == "csv":
        out = _csv(["n", "digit"], [(n, b) for n, b in enumerate(expansion.digits, 1)])
    else:
        lines = [
            f"base        {args.base}",
            f"input       {args.number}",
            f"digits      [{', '.join(map(str, expansion.digits))}]",
            f"count       {len(expansion.digits)}",
            f"terminated  {'yes' if expansion.terminated else 'no'}",
            f"remainder   {value_text(expansion.remainder)}",
        ]
        if exhausted:
            lines.append("precision exhausted: digits above are the certified prefix")
        out = "\n".join(lines) + "\n"
    return out, EXIT_EXHAUSTED if exhausted else EXIT_OK


def cmd_convergents(args) -> tuple[str, int]:
    x = parse_number(args.number, args.precision)
    _check_domain(x, args.base)
    expansion, exhausted = _expansion_of(args, x)
    m = args.base
    rows = []
    if expansion.digits:
        table = build_table(expansion.digits, m)
        for n in range(1, table.depth + 1):
            det = ok = None
            if n < table.depth:
                det = determinant(table, n)
                ok = det == (-1) ** (n + 1) * _power(m, table.exponent_sum(n))
            r = table.rows[n]
            rows.append((n, r.p, r.q, r.omega, r.integral, det, ok))
    if args.format == "json":
        out = _json({
            "command": "convergents",
            "input": args.number,
            "base": m,
            "digits": list(expansion.digits),
            "terminated": expansion.terminated,
            "precision_exhausted": exhausted,
            "rows": [{
                "n": n,
                "p": rational_json(p),
                "q": rational_json(q),
                "omega": rational_json(w),
                "integral": integral,
                "determinant": _maybe(det, rational_json),
                "determinant_ok": ok,
            } for n, p, q, w, integral, det, ok in rows],
        })
    elif args.format == "csv":
        out = _csv(["n", "p", "q", "omega", "integral", "determinant", "determinant_ok"],
                   [(n, rational_text(p), rational_text(q), rational_text(w), integral,
                     "" if det is None else rational_text(det), "" if ok is None else ok)
                    for n, p, q, w, integral, det, ok in rows])
    else:
        lines = [f"base {m}, input {args.number}, digits [{', '.join(map(str, expansion.digits))}]"]
        for n, p, q, w, integral, det, ok in rows:
            mark = "n/a" if ok is None else ("ok" if ok else "MISMATCH")
            flag = "" if integral else "  (non-integer)"
            lines.append(f"n={n}  p={rational_text(p)}  q={rational_text(q)}  "
                         f"omega={rational_text(w)}  det={mark}{flag}")
        if exhausted:
            lines.append("precision exhausted: rows above use the certified prefix")
        out = "\n".join(lines) + "\n"
    return out, EXIT_EXHAUSTED if exhausted else EXIT_OK


_BOUND_FIELDS = ("lower_weak", "lower_tight", "upper_tight", "upper_coarse")


def cmd_bounds(args) -> tuple[str, int]:
    x = parse_number(args.number, args.precision)
    if isinstance(x, PrecisionInterval):
        raise InputError("bounds needs an exact rational input")
    m = args.base
    _check_domain(x, m)
    if x == 0:
        raise InputError("0 has no digits, so there are no error bounds")
    if args.n is not None and args.n < 1:
        raise InputError("-n must be at least 1")
    cap = args.max_digits if args.n is None else max(args.max_digits, args.n + 1)
    expansion = expand(x, m, cap)
    count = len(expansion.digits)
    if args.n is not None:
        if args.n > count:
            raise InputError(f"the expansion has only {count} digits")
        depths = [args.n]
    else:
        depths = list(range(1, count + 1 if expansion.terminated else count))
    table = build_table(expansion.digits, m)
    rows = []
    for n in depths:
        row = error_bounds(table, expansion, n)
        power_ok, fib_ok = q_floors(table, n)
        rows.append((row, power_ok, fib_ok))
    if args.format == "json":
        out = _json({
            "command": "bounds",
            "input": args.number,
            "base": m,
            "digits": list(expansion.digits),
            "terminated": expansion.terminated,
            "rows": [{
                "n": row.n,
                "error": rational_json(row.error),
                "tau": rational_json(row.tau),
                "applicable": row.applicable,
                **{f: _maybe(getattr(row, f), rational_json) for f in _BOUND_FIELDS},
                "sign_ok": row.sign_ok,
                "sandwich_ok": row.sandwich_ok,
                "q_floor_power": rational_json(row.q_floor_power),
                "q_floor_fib": str(row.q_floor_fib),
                "power_floor_ok": power_ok,
                "fib_floor_ok": fib_ok,
            } for row, power_ok, fib_ok in rows],
        })
    elif args.format == "csv":
        out = _csv(["n", "error", "tau", *_BOUND_FIELDS, "sandwich_ok", "power_floor_ok", "fib_floor_ok"],
                   [(row.n, rational_text(row.error), rational_text(row.tau),
                     *("n/a" if getattr(row, f) is None else rational_text(getattr(row, f))
                       for f in _BOUND_FIELDS),
                     row.sandwich_ok, power_ok, fib_ok)
                    for row, power_ok, fib_ok in rows])
    else:
        lines = [f"base {m}, input {args.number}"]
        for row, power_ok, fib_ok in rows:
            lines.append(f"n={row.n}  error={rational_text(row.error)}")
            if row.applicable:
                for f in _BOUND_FIELDS:
                    lines.append(f"  {f:<12}{rational_text(getattr(row, f))}")
            else:
                lines.append("  bounds      n/a (remainder is 0)")
            lines.append(f"  sandwich    {'ok' if row.sandwich_ok else 'BROKEN'}")
            lines.append(f"  q_n >= m^S  {power_ok}")
            lines.append(f"  q_n >= F_n  {fib_ok}")
        out = "\n".join(lines) + "\n"
    return out, EXIT_OK


def _render_audit(report, args, extra: dict) -> str:
    if args.format == "json":
        return _json({**extra, **report.as_dict()})
    if args.format == "csv":
        return _csv(["base", "claim", "status", "alarm", "checked", "failures", "outside_condition",
                     "witnesses"],
                    [(e.base, e.claim, e.status, e.alarm, e.checked, e.failures, e.outside_condition,
                      len(e.witnesses)) for e in report.entries])
    lines = [f"inputs {report.inputs}, skipped {report.skipped}"]
    for key, value in report.findings.items():
        lines.append(f"{key.replace('_', ' ')}: {value}")
    for e in report.entries:
        cond = f" [if {e.condition}]" if e.condition else ""
        lines.append(f"m={e.base}  {e.claim:<22}{e.status:<24}checked {e.checked}, "
                     f"failures {e.failures}, outside condition {e.outside_condition}{cond}")
        for w in e.witnesses:
            digits = "" if w["digits"] is None else f" digits {w['digits']}"
            lines.append(f"    x={w['input']} n={w['n']}{digits}: {w['detail']}")
    lines.append("REGRESSION: an unconditional claim failed" if report.regression else "no regression")
    return "\n".join(lines) + "\n"


def _bases(text: str) -> list[int]:
    try:
        bases = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad base list {text!r}") from None
    for m in bases:
        if m < 2:
            raise InputError(f"base must be >= 2, got {m}")
    return bases


def cmd_audit(args) -> tuple[str, int]:
    bases = _bases(args.bases)
    if args.grid_q < 0 or args.random < 0 or args.random_max_q < 1:
        raise InputError("grid sizes must be nonnegative")
    top = max(bases, default=2) - 1
    grid = default_grid(args.grid_q, args.random, args.random_max_q, args.seed, top)
    report = audit(grid, bases, args.depth, max_witnesses=args.witnesses)
    config = {"bases": bases, "grid_q": args.grid_q, "random": args.random,
              "random_max_q": args.random_max_q, "depth": args.depth, "seed": args.seed}
    out = _render_audit(report, args, {"command": "audit", "config": config})
    return out, EXIT_REGRESSION if report.regression else EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    x = parse_number(args.number, args.precision)
    _check_domain(x, args.base)
    report = audit([x], [args.base], args.max_digits, max_witnesses=args.witnesses)
    config = {"bases": [args.base], "depth": args.max_digits}
    out = _render_audit(report, args, {"command": "verify", "input": args.number, "config": config})
    return out, EXIT_REGRESSION if report.regression else EXIT_OK


def _z_grid(text: str) -> list[Fraction]:
    grid = [parse_rational(t) for t in text.split(",") if t.strip()]
    for z in grid:
        if not 0 <= z <= 1:
            raise InputError(f"grid point {rational_text(z)} is outside [0, 1]")
    return grid


def cmd_gauss_kuzmin(args) -> tuple[str, int]:
    if args.samples < 1 or args.n < 0:
        raise InputError("--samples must be >= 1 and -n >= 0")
    rows = gauss_kuzmin_empirical(args.samples, args.n, _z_grid(args.z), args.seed)
    deviation = [abs(float(r.empirical) - r.reference) for r in rows]
    worst = max(deviation, default=0.0)
    if args.format == "json":
        out = _json({
            "command": "stats gauss-kuzmin",
            "samples": args.samples,
            "n": args.n,
            "seed": args.seed,
            "rows": [{"z": rational_json(r.z), "empirical": rational_json(r.empirical),
                      "reference": r.reference, "deviation": d} for r, d in zip(rows, deviation)],
            "max_deviation": worst,
        })
    elif args.format == "csv":
        out = _csv(["z", "empirical", "reference", "deviation"],
                   [(repr(float(r.z)), repr(float(r.empirical)), repr(r.reference), repr(d))
                    for r, d in zip(rows, deviation)])
    else:
        lines = [f"Gauss map, {args.samples} samples, n={args.n}, seed {args.seed}",
                 f"{'z':<8}{'empirical':<14}{'log2(z+1)':<14}deviation"]
        for r, d in zip(rows, deviation):
            lines.append(f"{float(r.z):<8.4g}{float(r.empirical):<14.6f}{r.reference:<14.6f}{d:.6f}")
        lines.append(f"max deviation {worst:.6f}")
        out = "\n".join(lines) + "\n"
    return out, EXIT_OK


def cmd_mcf_digits(args) -> tuple[str, int]:
    if args.samples < 1 or args.depth < 1:
        raise InputError("--samples and --depth must be >= 1")
    if args.digit_cap < -1:
        raise InputError("--digit-cap must be >= -1")
    h = mcf_digit_histogram(args.base, args.samples, args.depth, args.seed, args.digit_cap)
    rows = list(zip(h.labels, h.counts, h.frequencies))
    if args.format == "json":
        out = _json({
            "command": "stats mcf-digits",
            "banner": h.banner,
            "base": h.base,
            "samples": h.samples,
            "depth": h.depth,
            "seed": h.seed,
            "digit_cap": h.digit_cap,
            "total": h.total,
            "rows": [{"digit": label, "count": c, "frequency": rational_json(f)} for label, c, f in rows],
        })
    elif args.format == "csv":
        out = f"# {h.banner}\n" + _csv(["digit", "count", "frequency"],
                                       [(label, c, repr(float(f))) for label, c, f in rows])
    else:
        lines = [h.banner,
                 f"base {h.base}, {h.samples} samples, depth {h.depth}, seed {h.seed}, {h.total} digits"]
        for label, c, f in rows:
            lines.append(f"{label:>5}  {c:>10}  {float(f):.6f}")
        out = "\n".join(lines) + "\n"
    return out, EXIT_OK


def cmd_rcf(args) -> tuple[str, int]:
    x = parse_rational(args.number)
    if not 0 < x < 1:
        raise DomainError(f"{rational_text(x)} is outside (0, 1)")
    r = rcf_expand(x, args.max_digits)
    if args.format == "json":
        out = _json({"command": "rcf", "input": args.number, "quotients": list(r.quotients),
                     "terminated": r.terminated})
    elif args.format == "csv":
        out = _csv(["n", "quotient"], list(enumerate(r.quotients, 1)))
    else:
        out = (f"[0; {', '.join(map(str, r.quotients))}]"
               f"{'' if r.terminated else ' ...'}\n")
    return out, EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _base(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("base must be an integer >= 2")
    return value


def _precision(text: str) -> int:
    value = int(text)
    if value < MIN_PRECISION:
        raise argparse.ArgumentTypeError(f"precision must be at least {MIN_PRECISION} bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--max-digits", type=_positive, default=None,
                        help="digit cap (default: MCF_MAX_DIGITS or 5000)")
    common.add_argument("--precision", type=_precision, default=None,
                        help="working precision in bits for sqrt(...) inputs")
    common.add_argument("--seed", type=int, default=0)

    number = argparse.ArgumentParser(add_help=False)
    number.add_argument("number", help="integer, p/q, decimal, or sqrt(n) with optional /d and +r or -r")
    number.add_argument("--base", type=_base, default=2)

    parser = argparse.ArgumentParser(prog="mcfrac", description="Base-m continued fractions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common, number], help="digits of a number")
    p.set_defaults(run=cmd_expand)
    p = sub.add_parser("convergents", parents=[common, number], help="convergent table")
    p.set_defaults(run=cmd_convergents)
    p = sub.add_parser("bounds", parents=[common, number], help="error and its bounds per depth")
    p.add_argument("-n", type=int, default=None, help="single depth (default: every depth)")
    p.set_defaults(run=cmd_bounds)
    p = sub.add_parser("verify", parents=[common, number], help="audit every claim on one input")
    p.add_argument("--witnesses", type=int, default=20)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("audit", parents=[common], help="audit every claim over a grid of rationals")
    p.add_argument("--bases", default="2,3,5,10", help="comma-separated bases")
    p.add_argument("--grid-q", type=int, default=60, help="all p/q with q up to this bound")
    p.add_argument("--random", type=int, default=10_000, help="extra random fractions")
    p.add_argument("--random-max-q", type=int, default=10**6)
    p.add_argument("--depth", type=_positive, default=200, help="digit cap per input")
    p.add_argument("--witnesses", type=int, default=20)
    p.set_defaults(run=cmd_audit)

    stats = sub.add_parser("stats", help="Monte Carlo statistics")
    stats_sub = stats.add_subparsers(dest="stat", required=True)
    p = stats_sub.add_parser("gauss-kuzmin", parents=[common], help="Gauss map against log2(z+1)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("-n", type=int, default=8)
    p.add_argument("--z", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", help="comma-separated grid")
    p.set_defaults(run=cmd_gauss_kuzmin)
    p = stats_sub.add_parser("mcf-digits", parents=[common], help="digit frequencies of random points")
    p.add_argument("--base", type=_base, default=2)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--digit-cap", type=int, default=10)
    p.set_defaults(run=cmd_mcf_digits)

    p = sub.add_parser("rcf", parents=[common], help="regular continued fraction of a rational in (0, 1)")
    p.add_argument("number")
    p.set_defaults(run=cmd_rcf)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.max_digits is None:
            args.max_digits = default_max_digits()
        out, code = args.run(args)
    except (InputError, DomainError, ValueError, ZeroDivisionError) as exc:
        print(f"mcfrac: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
