#!/usr/bin/env python3
"""Center-block experiment: how fast planners reach 2% of the optimal cost.

Generates the five-map-width corpus, runs the requested planners over
paired seeds, and prints the per-width medians alongside the CSV summary.
"""

import argparse
import csv
from pathlib import Path

from nirrt.bench import run_matrix
from nirrt.cli import main as nirrt_cli


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/center_block")
    parser.add_argument("--count", type=int, default=100, help="instances (widths cycle)")
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--iters", type=int, default=3000)
    parser.add_argument("--planners", default="rrt-star,irrt-star,nrrt-png,nirrt-png-fc")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args()

    out = Path(args.out)
    corpus = out / "corpus"
    nirrt_cli(["gen-worlds", "--family", "center-block", "--count", str(args.count),
               "--seed", str(args.seed), "--out", str(corpus)])
    run_matrix(corpus, args.planners.split(","), args.seeds, out,
               iterations=args.iters, workers=args.workers)

    with (out / "summary.csv").open() as fh:
        for row in csv.DictReader(fh):
            if row["metric"] == "iters_to_2pct":
                print(f"{row['planner']:>14}  median iters to 2%: {row['median']:>8} "
                      f"(reached {row['n_reached']}/{row['n']})")


if __name__ == "__main__":
    main()
