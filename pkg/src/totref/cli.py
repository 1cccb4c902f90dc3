"""Command line entry point: ``totref SCRIPT [options]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ScriptError
from .runner import resolve_config, run_tasks
from .dsl import parse_script


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="totref", description="Run a verification script and print a report.")
    p.add_argument("script", help="script file, or - for standard input")
    p.add_argument("--field", help="coefficient field, e.g. F101, F5 or QQ")
    p.add_argument("--bound", type=int, help="homological bound (default 6)")
    p.add_argument("--degree-bound", type=int, dest="degree_bound", help="internal degree bound (default 12)")
    p.add_argument("--seed", type=int, help="seed for the regular-form search order")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of standard output")
    p.add_argument("--jobs", type=int, default=1, help="run independent tasks concurrently")
    p.add_argument("--no-timings", action="store_true", help="omit wall times from the JSON report")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        text = sys.stdin.read() if args.script == "-" else Path(args.script).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        print(f"totref: cannot read {args.script}: {e}", file=sys.stderr)
        return 2
    try:
        script = parse_script(text)
    except ScriptError as e:
        print(f"totref: {args.script}: {e}", file=sys.stderr)
        return 2
    if args.jobs < 1 or (args.bound is not None and args.bound < 0):
        print("totref: --jobs must be positive and --bound non-negative", file=sys.stderr)
        return 2
    flags = {"field": args.field, "bound": args.bound, "degree-bound": args.degree_bound,
             "seed": args.seed, "jobs": args.jobs}
    try:
        config = resolve_config(script, flags)
        report = run_tasks(script, config)
    except ValueError as e:  # bad field name and similar configuration problems
        print(f"totref: {e}", file=sys.stderr)
        return 2
    out = report.to_text() if args.format == "text" else report.to_json(timings=not args.no_timings)
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
