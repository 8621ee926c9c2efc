"""Command-line interface: corpus generation, single plans, benchmark matrices."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .config import PlannerConfig
from .planners import VARIANTS, plan
from .problems import FAMILIES, generate_instance
from .rng import RngHandle
from .world import load_problem, save_problem


def _cmd_gen_worlds(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        name, problem = generate_instance(args.family, i, args.seed)
        save_problem(problem, out / f"{name}.json")
    print(f"wrote {args.count} {args.family} worlds to {out}")
    return 0


def _cmd_plan(args) -> int:
    problem = load_problem(args.world)
    overrides = {}
    if args.iters is not None:
        overrides["max_iterations"] = args.iters
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    cfg = PlannerConfig.for_world(problem.world, **overrides)
    variant = VARIANTS[args.planner]
    provider = bench.build_provider(args.provider, problem, cfg) if variant.guidance else None
    rng = RngHandle(args.seed)
    _, record, _ = plan(problem, variant, cfg, rng, provider=provider,
                        problem_id=Path(args.world).stem)
    doc = record.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                                  encoding="utf-8")
        print(f"wrote run record to {args.out}")
    cost = record.final_cost
    print(f"{args.planner}: final cost {cost:.3f} after {record.iterations} iterations")
    return 0


def _cmd_bench(args) -> int:
    planners = [p.strip() for p in args.planners.split(",") if p.strip()]
    results = bench.run_matrix(args.corpus, planners, args.seeds, args.out,
                               iterations=args.iters, provider_spec=args.provider,
                               workers=args.workers, alpha=args.alpha)
    print(f"results in {results}, summary in {Path(args.out) / 'summary.csv'}")
    return 0


def _cmd_gen_training_data(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    family = "random3d" if args.dimension == 3 else "random2d"
    written = 0
    with out.open("w", encoding="utf-8") as fh:
        for i in range(args.count):
            name, problem = generate_instance(family, i, args.seed)
            cfg = PlannerConfig.for_world(problem.world)
            rng = RngHandle(bench.derive_seed("training", args.seed, i))
            record = bench.make_training_record(problem, cfg, rng)
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            written += 1
    print(f"wrote {written} training records to {out}")
    return 0


def _cmd_report(args) -> int:
    bench.report(args.results, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nirrt",
                                     description="Sampling-based planning benchmark toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-worlds", help="generate a problem corpus")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_worlds)

    p = sub.add_parser("plan", help="run one planner on one world")
    p.add_argument("--world", required=True)
    p.add_argument("--planner", choices=sorted(VARIANTS), required=True)
    p.add_argument("--provider", default="oracle",
                   help="oracle or remote:URL (NIRRT_PROVIDER_URL overrides the address)")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("bench", help="run a planner matrix over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--planners", required=True, help="comma-separated planner names")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--provider", default="oracle")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("gen-training-data", help="emit guidance training records (JSON lines)")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--dimension", type=int, choices=(2, 3), default=2)
    p.set_defaults(func=_cmd_gen_training_data)

    p = sub.add_parser("report", help="recompute summary.csv from results.jsonl")
    p.add_argument("--in", dest="results", required=True,
                   help="directory containing results.jsonl")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
