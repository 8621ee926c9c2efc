#!/usr/bin/env python3
"""Random-world experiment: cost relative to the baseline initial solution.

Runs the planner matrix over generated 2D (or 3D) random worlds and prints
the relative-cost table at the standard checkpoints after the first
solution.
"""

import argparse
import csv
from pathlib import Path

from nirrt.bench import run_matrix
from nirrt.cli import main as nirrt_cli


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/random_worlds")
    parser.add_argument("--dimension", type=int, choices=(2, 3), default=2)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seeds", type=int, default=2)
    parser.add_argument("--iters", type=int, default=None)
    parser.add_argument("--planners", default="rrt-star,irrt-star,nrrt-png,nirrt-png-fc")
    parser.add_argument("--provider", default="oracle")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args()

    family = "random3d" if args.dimension == 3 else "random2d"
    out = Path(args.out)
    corpus = out / "corpus"
    nirrt_cli(["gen-worlds", "--family", family, "--count", str(args.count),
               "--seed", str(args.seed), "--out", str(corpus)])
    run_matrix(corpus, args.planners.split(","), args.seeds, out,
               iterations=args.iters, provider_spec=args.provider, workers=args.workers)

    with (out / "summary.csv").open() as fh:
        for row in csv.DictReader(fh):
            if row["metric"].startswith("relative_cost@"):
                print(f"{row['planner']:>14}  {row['metric']:>18}: {row['mean']:>8} "
                      f"({row['n_reached']}/{row['n']} runs)")


if __name__ == "__main__":
    main()
