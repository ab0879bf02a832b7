"""Command-line front end: one verb per experiment.

Usage::

    sqglab <experiment> [--config FILE] [--out DIR] [--seed N] [--threads N]

Parameters come from the JSON config file when given; the command verb,
``--out`` and ``--seed`` flags override the file.  Exit status is 0 when
every verdict passed, 1 when any failed, 2 on a rejected configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .runner import EXPERIMENTS, config_from_dict, run_experiment
from .spectral import set_fft_workers

_HELP = {
    "partition-check": "dyadic ring invariants: support, plateau, sum to one",
    "verify-identity": "three-way agreement of the bilinear form routes",
    "constants": "sample operator constants and smallness thresholds",
    "solve": "Picard contraction, uniqueness and Lipschitz checks",
    "illpose-step1": "modulated bump sweep: data norms vs low-frequency floor",
    "illpose-step2": "lacunary forcing: disjoint annuli and homogeneity",
    "illpose-step3": "translated blocks: L4 additivity and inflation growth",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqglab",
        description="spectral experiments for the stationary advection fixed point",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENTS:
        cmd = sub.add_parser(name, help=_HELP[name])
        cmd.add_argument("--config", type=Path, default=None,
                         help="JSON file of experiment parameters")
        cmd.add_argument("--out", default=None,
                         help="directory for report artifacts (default: runs)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="random seed (default: 0)")
        cmd.add_argument("--threads", type=int, default=None,
                         help="FFT worker thread count")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    raw: dict = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as err:
            print(f"error: cannot read config {args.config}: {err}", file=sys.stderr)
            return 2
        if not isinstance(raw, dict):
            print(f"error: config {args.config} must hold a JSON object",
                  file=sys.stderr)
            return 2
    configured = raw.setdefault("experiment", args.experiment)
    if configured != args.experiment:
        print(
            f"error: config names experiment {configured!r} but the command "
            f"verb is {args.experiment!r}",
            file=sys.stderr,
        )
        return 2
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    if args.threads is not None:
        set_fft_workers(args.threads)

    try:
        cfg = config_from_dict(raw)
        report = run_experiment(cfg)
    except (ValueError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
