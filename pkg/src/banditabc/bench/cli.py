"""Command-line entry points.

    banditabc generate-observed <config.yaml>   simulate + persist the dataset
    banditabc run <config.yaml>                 full sweep, writes the reports
    banditabc report <run-dir>                  re-render tables from report.csv
    banditabc rank <run-dir>                    arm rankings from the bandit ledgers

The output root defaults to the current directory; BANDITABC_OUTPUT_ROOT
or --output-root overrides it.  --seed overrides the config seed.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import BanditAbcError
from .config import load_config
from .experiment import generate_observed, rank_report, run_experiment
from .report import aggregate_rows, load_report_rows, render_tables


def _add_config_arguments(parser):
    parser.add_argument("config", help="experiment config file (YAML)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--output-root", default=None,
        help="directory that receives the experiment directory "
        "(default: $BANDITABC_OUTPUT_ROOT or the current directory)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditabc",
        description="ABC rejection sampling benchmarks with bandit-selected summary statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-observed", help="simulate and persist the observed dataset")
    _add_config_arguments(p)

    p = sub.add_parser("run", help="run the configured experiment sweep")
    _add_config_arguments(p)

    p = sub.add_parser("report", help="print the report tables of a finished run")
    p.add_argument("run_dir", help="experiment directory containing report.csv")

    p = sub.add_parser("rank", help="print per-cell statistic rankings from the bandit ledgers")
    p.add_argument("run_dir", help="experiment directory containing cells/")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate-observed":
            cfg = load_config(args.config, seed_override=args.seed)
            out = generate_observed(cfg, output_root=args.output_root)
            print(f"observed dataset written to {out}")
        elif args.command == "run":
            cfg = load_config(args.config, seed_override=args.seed)
            rows, exp_dir = run_experiment(cfg, output_root=args.output_root)
            failed = sum(1 for r in rows if r.failed)
            print(f"{len(rows)} cells finished ({failed} failed); reports in {exp_dir}")
            print()
            print(render_tables(rows, aggregate_rows(rows)), end="")
        elif args.command == "report":
            rows = load_report_rows(args.run_dir)
            print(render_tables(rows, aggregate_rows(rows)), end="")
        else:
            print(rank_report(args.run_dir), end="")
    except BanditAbcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
