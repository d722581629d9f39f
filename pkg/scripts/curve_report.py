#!/usr/bin/env python3
"""Print a compact text view of the demand curves in exp1_curves.csv.

For each deadline regime the report shows, per model, the opponent's mean
utility of the team offer at a handful of evenly spaced rounds, plus the
final-quarter average that the trend checks look at. Useful for eyeballing
which team model concedes how fast without plotting anything.
"""

from __future__ import annotations

import argparse
import csv
from collections import defaultdict
from statistics import mean


def load_curves(path: str) -> dict[tuple[str, str], dict[int, float]]:
    curves: dict[tuple[str, str], dict[int, float]] = defaultdict(dict)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            curves[(row["deadline"], row["model"])][int(row["round"])] = float(
                row["mean_u_op"]
            )
    return curves


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("curves", help="path to exp1_curves.csv")
    parser.add_argument(
        "--points", type=int, default=6, help="sample rounds per curve (default 6)"
    )
    args = parser.parse_args()
    curves = load_curves(args.curves)
    regimes = sorted({regime for regime, _ in curves})
    for regime in regimes:
        models = sorted(model for r, model in curves if r == regime)
        deadline = max(curves[(regime, models[0])])
        sample = sorted(
            {round(i * deadline / (args.points - 1)) for i in range(args.points)}
        )
        quarter = range(deadline - deadline // 4 + 1, deadline + 1)
        print(f"\n{regime} deadline ({deadline} rounds), opponent view of team offers")
        header = ["model"] + [f"t={t}" for t in sample] + ["last quarter"]
        widths = [max(12, len(h) + 2) for h in header]
        print("".join(h.ljust(w) for h, w in zip(header, widths)))
        for model in models:
            curve = curves[(regime, model)]
            cells = [model] + [f"{curve[t]:.3f}" for t in sample]
            cells.append(f"{mean(curve[t] for t in quarter):.3f}")
            print("".join(c.ljust(w) for c, w in zip(cells, widths)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
