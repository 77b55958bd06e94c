"""Command-line front end.

Exit codes: 0 success, 2 usage or precondition error, 3 numeric failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import sys

from . import report
from .billiard import PhasePoint
from .errors import DomainError, StadiumError
from .geometry import StadiumTable
from .orbits import RealizationError, realize_word
from .sft import levels_for_length

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _word(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad word {text!r}: {exc}") from exc


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stadium-entropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        p.add_argument("--tol", type=_positive, default=None, help="numerical tolerance override")

    p = sub.add_parser("entropy-table", help="entropy lower bounds for a list of table lengths")
    p.add_argument("--ell", type=float, nargs="+", required=True)
    p.add_argument("--n-cap", type=int, default=None, help="upper limit on N")
    p.add_argument("--allow-short", action="store_true", help="accept ell <= 4 (uncertified rows)")
    common(p)

    p = sub.add_parser("simulate", help="iterate the billiard map and print the trace")
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--phi0", type=float, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--n-cap", type=int, default=3, help="N for the K_N membership flag")
    p.add_argument("--strict", action="store_true", help="fail (exit 3) on a singular iterate")
    common(p)

    p = sub.add_parser("find-orbit", help="realize a level word as a billiard orbit")
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--word", type=_word, required=True, help='e.g. "0 1 2 0"')
    p.add_argument("--n-cap", type=int, default=None, help="N of the level alphabet (default: largest with ell > 2N+2)")
    common(p)

    p = sub.add_parser("verify", help="exhaustive conjugacy sweep plus entropy and measure checks")
    p.add_argument("--ell", type=float, default=10.0)
    p.add_argument("--n-cap", type=int, default=3)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_entropy_table(args) -> int:
    if not args.allow_short and any(not ell > 4.0 for ell in args.ell):
        raise UsageError("every --ell must exceed 4 (use --allow-short for uncertified rows)")
    if args.n_cap is not None and args.n_cap < 0:
        raise UsageError("--n-cap must be non-negative")
    rows = report.entropy_table(args.ell, args.n_cap, args.tol or 1e-12)
    if args.format == "csv":
        _emit(report.to_csv(rows, report.ENTROPY_COLUMNS), args.out)
    else:
        _emit(report.to_json({"command": "entropy-table", "rows": rows}), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    table = StadiumTable(args.ell)
    if not 0.0 <= args.r0 < table.perimeter:
        raise UsageError(f"--r0 must lie in [0, {table.perimeter})")
    trace = report.simulate_trace(table, PhasePoint(args.r0, args.phi0), args.steps, args.n_cap)
    tol = args.tol or 1e-9
    self_check = all(row["reflection_residual"] < tol for row in trace["rows"])
    if args.format == "csv":
        _emit(report.to_csv(trace["rows"], report.TRACE_COLUMNS), args.out)
    else:
        _emit(report.to_json({
            "command": "simulate", "ell": args.ell, "N": args.n_cap,
            "in_K": trace["in_K"], "in_KN": trace["in_KN"],
            "singular": trace["singular"], "self_check": self_check, "rows": trace["rows"],
        }), args.out)
    if trace["singular"] is not None:
        print(f"singular at step {trace['singular']['step']}: {trace['singular']['reason']}", file=sys.stderr)
        if args.strict:
            return EXIT_NUMERIC
    return EXIT_OK if self_check else EXIT_VERIFY


def cmd_find_orbit(args) -> int:
    n = args.n_cap if args.n_cap is not None else levels_for_length(args.ell)
    if n < 1 or not args.ell > 2 * n + 2:
        raise UsageError(f"need N >= 1 and ell > 2N+2 (ell={args.ell}, N={n})")
    try:
        res = realize_word(StadiumTable(args.ell), args.word, n)
    except RealizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.stage in ("precondition", "unfold"):
            return EXIT_USAGE
        if exc.stage == "maximize":
            return EXIT_NUMERIC
        return EXIT_VERIFY
    payload = res.to_dict()
    if args.format == "csv":
        row = {k: v for k, v in payload.items() if k != "polyline"}
        row["word"] = " ".join(map(str, row["word"]))
        row["extended_word"] = " ".join(map(str, row["extended_word"]))
        row["r"], row["phi"] = row.pop("phase_point").values()
        _emit(report.to_csv([row], list(row)), args.out)
    else:
        _emit(report.to_json({"command": "find-orbit", "ell": args.ell, "N": n, **payload}), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    n = args.n_cap
    if n < 1 or not args.ell > 2 * n + 2:
        raise UsageError(f"need N >= 1 and ell > 2N+2 (ell={args.ell}, N={n})")
    if not 1 <= args.depth <= 10:
        raise UsageError("--depth must be in 1..10")
    sweep = report.conjugacy_sweep(args.ell, n, args.depth, args.jobs)
    agreement = report.agreement_report(range(1, 11))
    distortion = report.distortion_report(args.ell, 100, 1e-5, args.seed)
    checks = {
        "conjugacy": sweep["failed"] == 0,
        "entropy_agreement": agreement["max_discrepancy"] < 1e-9 and len(agreement["index_shifts"]) == 1,
        "measure_distortion": distortion["max_deviation"] < 1e-3,
    }
    if args.format == "csv":
        rows = [
            {"check": "conjugacy", "value": sweep["worst_residual"], "passed": checks["conjugacy"],
             "detail": f"{sweep['passed']}/{sweep['words']} words"},
            {"check": "entropy_agreement", "value": agreement["max_discrepancy"],
             "passed": checks["entropy_agreement"], "detail": f"k = N + {agreement['index_shifts']}"},
            {"check": "measure_distortion", "value": distortion["max_deviation"],
             "passed": checks["measure_distortion"], "detail": f"{distortion['points']} points"},
        ]
        _emit(report.to_csv(rows, ["check", "value", "passed", "detail"]), args.out)
    else:
        _emit(report.to_json({
            "command": "verify", "ell": args.ell, "N": n, "depth": args.depth,
            "checks": checks, "conjugacy": sweep, "entropy_agreement": agreement,
            "measure_distortion": distortion,
        }), args.out)
    for f in sweep["failures"]:
        print(f"failed word {' '.join(map(str, f['word']))}: {f['error']}", file=sys.stderr)
    return EXIT_OK if all(checks.values()) else EXIT_VERIFY


COMMANDS = {
    "entropy-table": cmd_entropy_table,
    "simulate": cmd_simulate,
    "find-orbit": cmd_find_orbit,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StadiumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
