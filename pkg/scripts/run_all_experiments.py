#!/usr/bin/env python3
"""Run all four studies and write their CSV files into one directory.

Thin convenience wrapper over the ``teamnego run`` subcommand: same seeds,
same outputs, one invocation. The default scale 0.25 finishes on a laptop;
use --scale 1.0 for the full workload.
"""

from __future__ import annotations

import argparse
import sys
import time

from teamnego.harness.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--scale",
        type=float,
        default=0.25,
        help="fraction of the full workload (default 0.25)",
    )
    parser.add_argument(
        "--config", default=None, help="key = value overrides applied to every study"
    )
    args = parser.parse_args()
    for experiment in (1, 2, 3, 4):
        argv = [
            "run",
            str(experiment),
            "--out",
            args.out,
            "--seed",
            str(args.seed),
            "--scale",
            str(args.scale),
        ]
        if args.config is not None:
            argv += ["--config", args.config]
        started = time.monotonic()
        code = cli_main(argv)
        if code != 0:
            print(f"study {experiment} failed with exit code {code}", file=sys.stderr)
            return code
        print(f"study {experiment} done in {time.monotonic() - started:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
