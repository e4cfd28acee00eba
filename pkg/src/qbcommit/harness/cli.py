"""Command-line entry point: ``qbcommit <experiment> [flags]``.

Exit status is 0 when every row passes, 1 when a bound is violated and 2 on
a configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from ..funcfam import FunctionFamilyInstance
from .experiments import EXPERIMENTS, ConfigError, run_experiment
from .reports import write_report

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def load_params(raw: str | None) -> dict:
    """``--params`` is inline JSON or a path to a JSON file."""
    if raw is None:
        return {}
    path = Path(raw)
    text = path.read_text() if path.is_file() else raw
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--params is neither a JSON object nor a readable file: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("--params must be a JSON object")
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbcommit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, fn in EXPERIMENTS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--params", help="JSON object or path to a JSON file overriding the defaults")
        p.add_argument("--function-table", type=Path, help="JSON file {n, table} replacing the generated family")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = load_params(args.params)
        table = None
        if args.function_table is not None:
            if not args.function_table.is_file():
                raise ConfigError(f"function table {args.function_table} does not exist")
            table = FunctionFamilyInstance.load(args.function_table)
        report = run_experiment(args.experiment, params, table, args.seed)
    except ValueError as exc:  # ConfigError, budget and enumeration errors all derive from it
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = write_report(report, args.out, args.format)
    if args.out is None:
        sys.stdout.write(text)
    failing = sum(not r.passed for r in report.rows)
    print(f"{report.experiment}: {len(report.rows)} rows, {failing} failing", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
