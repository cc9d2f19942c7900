"""Command-line entry point for the experiment runners.

Subcommands mirror the figure families plus classification and bound dumps:

    hybridfb fig1 --config scenario.cfg --out fig1.csv --trials 500 --threads 4

With a fixed seed the emitted CSV is byte-identical across runs and thread
counts.  Without --out the CSV goes to stdout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import (
    _check_config,
    run_bound,
    run_classify,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    validate_config,
)

_RUNNERS = {
    "fig1": run_fig1,
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig4": run_fig4,
    "classify": run_classify,
    "bound": run_bound,
}

_HELP = {
    "fig1": "proposed-scheme Monte Carlo, analytical bound and perfect-CSI benchmark vs power",
    "fig2": "proposed vs conventional schemes (DFT/skewed codebooks) vs power",
    "fig3": "scheme comparison vs the number of users",
    "fig4": "scheme comparison vs the global feedback budget",
    "classify": "greedy user classification per power point",
    "bound": "covariance-only sum-rate bound per power point",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridfb",
        description="hybrid statistical/instantaneous feedback experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, runner_help in _HELP.items():
        p = sub.add_parser(name, help=runner_help)
        p.add_argument("--config", type=Path, default=None,
                       help="flat key=value scenario file (defaults used when omitted)")
        p.add_argument("--out", type=Path, default=None,
                       help="CSV output path (stdout when omitted)")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--trials", type=int, default=None,
                       help="override the Monte Carlo trial count")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads across grid points (results are identical)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    text = args.config.read_text(encoding="utf-8") if args.config else ""
    try:
        config = validate_config(text)
        if args.seed is not None or args.trials is not None:
            if args.seed is not None:
                config = replace(config, seed=args.seed)
            if args.trials is not None:
                config = replace(config, trials=args.trials)
            _check_config(config)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    csv_text = _RUNNERS[args.command](config, threads=max(args.threads, 1))
    if args.out is None:
        sys.stdout.write(csv_text)
    else:
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            fh.write(csv_text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
