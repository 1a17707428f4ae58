#!/usr/bin/env python3
"""Run the full-scale oscillator sweep (hours of wall time for the full grid).

`--pool-sizes` and `--repetitions` trim the grid without editing the config:

    python scripts/run_full_scale.py --pool-sizes 10 50 200 --repetitions 5
"""

import argparse
from dataclasses import replace
from pathlib import Path

from banditabc.bench import load_config, run_experiment
from banditabc.bench.report import aggregate_rows, render_tables


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config",
        default=Path(__file__).resolve().parent.parent / "configs" / "full_vilar.yaml",
    )
    parser.add_argument("--pool-sizes", type=int, nargs="+", default=None)
    parser.add_argument("--repetitions", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output-root", default=None)
    args = parser.parse_args()

    cfg = load_config(args.config, seed_override=args.seed)
    if args.pool_sizes is not None:
        cfg = replace(cfg, pool_sizes=tuple(args.pool_sizes))
    if args.repetitions is not None:
        cfg = replace(cfg, repetitions=args.repetitions)

    rows, exp_dir = run_experiment(cfg, output_root=args.output_root)
    print(f"reports written to {exp_dir}\n")
    print(render_tables(rows, aggregate_rows(rows)), end="")


if __name__ == "__main__":
    main()
