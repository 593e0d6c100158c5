"""
Command-line front end.

    contextleak example1 [--json] [--bits]
    contextleak example2 [--alpha A] [--p-min P] [--p-max P] [--p-steps N] [--out FILE]
    contextleak run SCENARIO.json [--json] [--bits]
    contextleak verify [--seed S] [--trials N] [--suite NAME ...]

Everything is printed in nats with six decimals; ``--bits`` rescales the
display only. Output depends only on the flags, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import ContextLeakError
from .scenario_file import ScenarioError, evaluate, format_value, parse_scenario
from .scenarios import Example2Config, default_p_grid, run_example1, run_example2
from .verify import SUITES, run_all

CSV_HEADER = ("p,concurrence,mutual_info,leak_no_mem,leak_with_mem,leak_diff,"
              "concurrence_norm,mutual_info_norm,leak_diff_norm")


def _num(v: float, bits: bool = False) -> str:
    return format_value(v, bits)


def _json_num(v: float, bits: bool = False) -> float:
    return round(v / math.log(2) if bits else v, 12)


def cmd_example1(args) -> int:
    res = run_example1()
    unit = "bits" if args.bits else "nats"
    if args.json:
        doc = {
            "unit": unit,
            "old_avg": _json_num(res.old_avg, args.bits),
            "new_avg": _json_num(res.new_avg, args.bits),
            "contexts": [
                {"x": c.x, "y": c.y, "old_ipc": _json_num(c.old, args.bits), "ipc_modified": _json_num(c.new, args.bits)}
                for c in res.contexts
            ],
        }
        print(json.dumps(doc, indent=2))
        return 0
    print(f"# maximally mixed qubit, X and Y drawn from {{sigma_z, sigma_x}} ({unit})")
    print(f"{'X':>8} {'Y':>8} {'old_ipc':>10} {'ipc_modified':>13}")
    for c in res.contexts:
        print(f"{'sigma_' + c.x:>8} {'sigma_' + c.y:>8} {_num(c.old, args.bits):>10} {_num(c.new, args.bits):>13}")
    print(f"old_avg = {_num(res.old_avg, args.bits)}")
    print(f"new_avg = {_num(res.new_avg, args.bits)}")
    return 0


def _csv_field(v: float, precision: int) -> str:
    s = f"{v:.{precision}f}"
    return s[1:] if s.startswith("-") and float(s) == 0 else s


def cmd_example2(args, parser) -> int:
    if args.p_min < 0.5:
        parser.error(f"--p-min must be at least 0.5 (got {args.p_min}); smaller p makes the memory weight negative")
    if args.p_max > 1 or args.p_max < args.p_min:
        parser.error(f"--p-max must lie in [p-min, 1] (got {args.p_max})")
    if args.p_steps < 1:
        parser.error("--p-steps must be positive")
    if not 0 <= args.alpha <= 1:
        parser.error("--alpha must lie in [0, 1]")
    try:
        cfg = Example2Config(args.alpha, default_p_grid(args.p_min, args.p_max, args.p_steps))
        res = run_example2(cfg)
    except ContextLeakError as exc:
        parser.error(str(exc))
    lines = [CSV_HEADER]
    for r in res.rows:
        vals = (r.p, r.concurrence, r.mutual_info_inM, r.leak_no_mem, r.leak_with_mem, r.leak_difference,
                r.normalized_concurrence, r.normalized_mutual_info, r.normalized_leak_difference)
        lines.append(",".join(_csv_field(v, args.precision) for v in vals))
    text = "\n".join(lines) + "\n"
    summary = [f"p_star = {res.concurrence_zero_crossing:.6f}"]
    if res.unnormalized_columns:
        summary.append("not normalized (identically zero): " + ", ".join(res.unnormalized_columns))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        for line in summary:
            print(line)
    else:
        sys.stdout.write(text)
        for line in summary:
            print(line, file=sys.stderr)
    return 0


def cmd_run(args) -> int:
    try:
        text = Path(args.scenario).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.scenario}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        report = evaluate(parse_scenario(text))
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 1
    except ContextLeakError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 1
    unit = "bits" if args.bits else "nats"
    if args.json:
        doc = {"unit": unit,
               "values": {k: _json_num(v, args.bits) for k, v in report.values.items()},
               "notes": report.notes}
        print(json.dumps(doc, indent=2))
        return 0
    width = max(len(k) for k in report.values)
    print(f"# {Path(args.scenario).name} ({unit})")
    for k, v in report.values.items():
        print(f"{k:<{width}} = {_num(v, args.bits)}")
    for note in report.notes:
        print(f"note: {note}")
    return 0


def cmd_verify(args) -> int:
    results = run_all(args.seed, args.trials, args.suite or None)
    width = max(len(r.name) for r in results)
    print(f"# seed={args.seed} trials={args.trials}")
    print(f"{'suite':<{width}}  {'result':<6}  {'max_violation':>13}  claim")
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status:<6}  {r.max_violation:>13.3e}  {r.claim}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="contextleak", description="Incompatibility and information leakage of physical contexts.")
    sub = ap.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("example1", help="maximally mixed qubit with sigma_z / sigma_x contexts")
    p1.add_argument("--json", action="store_true", help="machine-readable output")
    p1.add_argument("--bits", action="store_true", help="display values in bits")

    p2 = sub.add_parser("example2", help="qubit-memory sweep, CSV output")
    p2.add_argument("--alpha", type=float, default=0.25)
    p2.add_argument("--p-min", type=float, default=0.5)
    p2.add_argument("--p-max", type=float, default=1.0)
    p2.add_argument("--p-steps", type=int, default=101)
    p2.add_argument("--precision", type=int, default=6, help="decimal places in the CSV")
    p2.add_argument("--out", help="CSV path (default: stdout)")

    p3 = sub.add_parser("run", help="evaluate a JSON scenario file")
    p3.add_argument("scenario")
    p3.add_argument("--json", action="store_true")
    p3.add_argument("--bits", action="store_true")

    p4 = sub.add_parser("verify", help="seeded property suites")
    p4.add_argument("--seed", type=int, default=0)
    p4.add_argument("--trials", type=int, default=1000)
    p4.add_argument("--suite", action="append", choices=sorted(SUITES), metavar="NAME",
                    help="run only this suite (repeatable); one of: " + ", ".join(SUITES))
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "example1":
        return cmd_example1(args)
    if args.command == "example2":
        return cmd_example2(args, ap)
    if args.command == "run":
        return cmd_run(args)
    if args.trials < 1:
        ap.error("--trials must be positive")
    return cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
