#!/usr/bin/env python3
"""Narrow-passage experiment: iterations until a path beats the flanking route."""

import argparse
import csv
from pathlib import Path

from nirrt.bench import run_matrix
from nirrt.cli import main as nirrt_cli


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/narrow_passage")
    parser.add_argument("--count", type=int, default=100, help="instances (gap heights cycle)")
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--iters", type=int, default=3000)
    parser.add_argument("--planners", default="rrt-star,irrt-star,nirrt-png-f,nirrt-png-fc")
    parser.add_argument("--provider", default="oracle")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args()

    out = Path(args.out)
    corpus = out / "corpus"
    nirrt_cli(["gen-worlds", "--family", "narrow-passage", "--count", str(args.count),
               "--seed", str(args.seed), "--out", str(corpus)])
    run_matrix(corpus, args.planners.split(","), args.seeds, out,
               iterations=args.iters, provider_spec=args.provider, workers=args.workers)

    with (out / "summary.csv").open() as fh:
        for row in csv.DictReader(fh):
            if row["metric"] == "iters_to_through_gap":
                print(f"{row['planner']:>14}  median iters through gap: {row['median']:>8} "
                      f"(reached {row['n_reached']}/{row['n']})")


if __name__ == "__main__":
    main()
