"""Command-line front end.

Every subcommand writes one JSON document to stdout (stderr carries
diagnostics only), so outputs pipe cleanly into scripts and tests.  Exit
codes: 0 success, 1 domain error, 2 usage error.  Numbers are emitted at
full float precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .contraction import audit_final_chain, qm
from .errors import DomainError
from .expansion import DigitSequence, ExpansionParams, decode, encode
from .gk import (
    DEFAULT_GRID_SIZE,
    DEFAULT_TOL,
    GridFunction,
    iterate_with_final,
    rate_estimate,
)
from .measure import MeasureParams, gamma_cdf, gamma_density
from .stats import sample_orbit


@dataclass(frozen=True)
class CliConfig:
    """Validated knobs shared by the numerical subcommands."""

    m: int
    grid_size: int = DEFAULT_GRID_SIZE
    tol: float = DEFAULT_TOL
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self) -> None:
        if self.m < 2:
            raise DomainError(f"base must be >= 2, got {self.m}")
        n = self.grid_size - 1
        if self.grid_size < 17 or n & (n - 1) != 0:
            raise DomainError(
                f"grid size must be 2^k + 1 and >= 17, got {self.grid_size}"
            )
        if self.tol <= 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.output_format not in ("json", "plain", "csv"):
            raise DomainError(f"unknown output format {self.output_format!r}")


def _number(text: str):
    """Parse a decimal or p/q rational; rationals route to exact arithmetic."""
    try:
        if "/" in text:
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _digit_list(text: str) -> list[int]:
    try:
        digits = [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed digit list: {text!r}") from exc
    if not digits or any(a < 0 for a in digits):
        raise argparse.ArgumentTypeError(f"malformed digit list: {text!r}")
    return digits


def _scan_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo_i, hi_i = int(lo), int(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from exc
    if hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"empty scan range {text!r}")
    return lo_i, hi_i


def _cmd_expand(args) -> dict:
    params = ExpansionParams(args.m)
    seq = encode(args.x, params, args.digits)
    if seq.precision_warning:
        print("warning: floating orbit lost precision; trailing digits unreliable",
              file=sys.stderr)
    return {"digits": list(seq.digits), "terminated": seq.terminated}


def _cmd_decode(args) -> dict:
    params = ExpansionParams(args.m)
    seq = DigitSequence(params, tuple(args.digits), terminated=True)
    exact, approx = decode(seq)
    return {"exact": f"{exact.numerator}/{exact.denominator}", "approx": approx}


def _cmd_cdf(args) -> dict:
    mp = MeasureParams.for_base(args.m)
    x = float(args.x)
    return {"G": gamma_cdf(x, mp), "density": gamma_density(x, mp), "k": mp.k}


def _cmd_iterate(args) -> dict:
    mp = MeasureParams.for_base(args.m)
    if args.initial == "lebesgue":
        config = CliConfig(m=args.m, grid_size=args.grid, tol=args.tol)
        F0 = GridFunction.lebesgue(config.grid_size)
    else:
        F0 = GridFunction.from_csv(args.initial)
    reports, final = iterate_with_final(F0, mp, args.steps, args.tol)
    window = args.window if args.window is not None else min(11, args.steps - 1)
    if window >= 1:
        fit = rate_estimate(reports, window)
        rate, degenerate = fit.rate, fit.degenerate
    else:
        rate, degenerate = None, True
    if args.dump_final is not None:
        final.to_csv(args.dump_final)
    return {
        "m": args.m,
        "steps": args.steps,
        "reports": [
            {"n": r.n, "sup_error": r.sup_error, "ratio": r.ratio} for r in reports
        ],
        "rate": rate,
        "rate_degenerate": degenerate,
    }


def _qm_payload(m: int, tol: float) -> dict:
    bound = qm(m, tol)
    return {
        "m": bound.m,
        "q_m": bound.value,
        "tail_bound": bound.tail_bound,
        "below_one": bound.below_one,
    }


def _cmd_qm(args):
    if args.scan is not None:
        lo, hi = args.scan
        return [_qm_payload(m, args.tol) for m in range(lo, hi + 1)]
    return _qm_payload(args.m, args.tol)


def _cmd_audit(args) -> dict:
    report = audit_final_chain(args.m)
    return {
        "m": report.m,
        "prefactor": report.prefactor,
        "term_first": report.term_first,
        "term_middle_printed": report.term_middle_printed,
        "term_middle_squared": report.term_middle_squared,
        "term_tail": report.term_tail,
        "printed_value": report.printed_value,
        "squared_value": report.squared_value,
        "printed_at_most_one": report.printed_at_most_one,
        "squared_at_most_one": report.squared_at_most_one,
        "q_m": report.series.value,
        "q_m_tail_bound": report.series.tail_bound,
        "q_m_below_one": report.series.below_one,
        "verdict": report.verdict,
    }


def _cmd_sample(args) -> dict:
    mp = MeasureParams.for_base(args.m)
    report = sample_orbit(args.seed, args.points, args.burn_in, mp)
    return {
        "m": report.m,
        "n_samples": report.n_samples,
        "burn_in": report.burn_in,
        "seed": report.seed,
        "counts": {str(i): c for i, c in report.counts.items()},
        "expected": {str(i): p for i, p in report.expected.items()},
        "chi_square": report.chi_square,
        "max_abs_freq_error": report.max_abs_freq_error,
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chancf",
        description="Base-m Chan continued fractions: expansions, invariant "
        "measure, distribution iteration, contraction bounds.",
    )
    parser.add_argument("--format", choices=("json", "plain", "csv"), default="json",
                        help="output format (default json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="digit expansion of x")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", type=_number, required=True,
                   help="value in (0,1); p/q strings use exact arithmetic")
    p.add_argument("--digits", type=int, required=True, help="maximum digits")
    p.set_defaults(handler=_cmd_expand)

    p = sub.add_parser("decode", help="exact value of a digit string")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--digits", type=_digit_list, required=True, help="comma-separated digits")
    p.set_defaults(handler=_cmd_decode)

    p = sub.add_parser("cdf", help="invariant-measure CDF and density at x")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", type=_number, required=True)
    p.set_defaults(handler=_cmd_cdf)

    p = sub.add_parser("iterate", help="run the distribution iteration")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--initial", default="lebesgue",
                   help="'lebesgue' or a CSV file with header x,F")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE,
                   help="grid size 2^k+1 (ignored when --initial is a file)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--window", type=int, default=None,
                   help="points-1 used for the rate fit (default min(11, steps-1))")
    p.add_argument("--dump-final", default=None, metavar="FILE.csv",
                   help="write the final iterate to a CSV grid file")
    p.set_defaults(handler=_cmd_iterate)

    p = sub.add_parser("qm", help="contraction constant with certified tail")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int)
    group.add_argument("--scan", type=_scan_range, metavar="A..B",
                       help="evaluate for every base in A..B")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(handler=_cmd_qm)

    p = sub.add_parser("audit", help="evaluate the printed q_m <= 1 chain verbatim")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(handler=_cmd_audit)

    p = sub.add_parser("sample", help="Monte Carlo digit-law report")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=_cmd_sample)

    return parser


def _flatten(payload, prefix: str = "") -> list[str]:
    lines: list[str] = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            lines.extend(_flatten(value, f"{prefix}{key}." if prefix else f"{key}."))
    elif isinstance(payload, list):
        for idx, value in enumerate(payload):
            lines.extend(_flatten(value, f"{prefix}{idx}."))
    else:
        lines.append(f"{prefix[:-1]}={payload!r}" if prefix else repr(payload))
    return lines


def _emit_csv(payload) -> None:
    rows = payload.get("reports") if isinstance(payload, dict) else payload
    if not isinstance(rows, list) or not rows or not isinstance(rows[0], dict):
        raise DomainError("csv format applies only to tabular output (iterate, qm --scan)")
    keys = list(rows[0].keys())
    print(",".join(keys))
    for row in rows:
        print(",".join(repr(row.get(k)) for k in keys))


def _emit(payload, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    elif fmt == "plain":
        for line in _flatten(payload):
            print(line)
    else:
        _emit_csv(payload)


def run(argv: list[str] | None = None) -> int:
    """Parse argv and execute one subcommand; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = args.handler(args)
        _emit(payload, args.format)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))
