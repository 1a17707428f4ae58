#!/usr/bin/env python3
"""Run the desk-scale oscillator benchmark and print the report tables.

Equivalent to `banditabc run configs/desk_vilar.yaml`, kept as a script for
programmatic tweaking of the config.
"""

import argparse
from pathlib import Path

from banditabc.bench import load_config, run_experiment
from banditabc.bench.report import aggregate_rows, render_tables


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--config",
        default=Path(__file__).resolve().parent.parent / "configs" / "desk_vilar.yaml",
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output-root", default=None)
    args = parser.parse_args()

    cfg = load_config(args.config, seed_override=args.seed)
    rows, exp_dir = run_experiment(cfg, output_root=args.output_root)
    print(f"reports written to {exp_dir}\n")
    print(render_tables(rows, aggregate_rows(rows)), end="")


if __name__ == "__main__":
    main()
