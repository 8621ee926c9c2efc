"""Benchmark harness: run matrices over problem corpora, metrics, reports.

Cells (problem x planner x seed index) are independent and resumable:
results.jsonl is the source of truth, and reruns only compute cells that
are missing from it. Seeds are paired across planners for a given problem
and seed index so head-to-head comparisons share the sample stream.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PlannerConfig
from .errors import PlanningError
from .grid import OracleGuidanceProvider, astar, label_guidance, nearest_free_cell, rasterize
from .guidance import RemoteGuidanceProvider, point_cloud_sampling
from .planners import VARIANTS, RunRecord, plan
from .problems import center_block_optimal_cost, narrow_passage_meta
from .rng import RngHandle, derive_seed
from .world import ProblemInstance, load_problem, problem_to_json

PROVIDER_URL_ENV = "NIRRT_PROVIDER_URL"
RELATIVE_COST_CHECKPOINTS = (0, 250, 500, 1000, 1500)


# --- metrics ----------------------------------------------------------------


def metric_iters_to_threshold(record: RunRecord, c_opt: float, tol: float):
    """First iteration count with best cost <= (1 + tol) * c_opt, else None."""
    if c_opt <= 0:
        raise PlanningError(f"optimal cost must be positive, got {c_opt}")
    threshold = (1.0 + tol) * c_opt
    for iteration, cost in record.trace:
        if cost <= threshold:
            return iteration
    return None


def metric_through_gap(record: RunRecord, flanking_cost: float):
    """First iteration with best cost strictly below the flanking cost."""
    for iteration, cost in record.trace:
        if cost < flanking_cost:
            return iteration
    return None


def metric_relative_cost(records: list[RunRecord],
                         checkpoints=RELATIVE_COST_CHECKPOINTS,
                         baseline: str = "rrt-star"):
    """Average cost relative to the baseline's initial solution.

    For every planner and checkpoint offset, the cost at (first solution
    iteration + offset) is divided by the baseline planner's initial
    solution cost on the same problem and seed, then averaged. Runs with
    no solution (or no baseline) are counted as excluded rather than
    failing the table.
    """
    baseline_cost: dict[tuple[str, int], float] = {}
    for rec in records:
        if rec.planner == baseline and rec.first_solution_iteration is not None:
            first = rec.cost_at(rec.first_solution_iteration)
            baseline_cost[(rec.problem_id, rec.seed)] = first
    rows = []
    planners = sorted({rec.planner for rec in records})
    for planner in planners:
        for offset in checkpoints:
            ratios = []
            excluded = 0
            for rec in records:
                if rec.planner != planner:
                    continue
                base = baseline_cost.get((rec.problem_id, rec.seed))
                if base is None or rec.first_solution_iteration is None:
                    excluded += 1
                    continue
                cost = rec.cost_at(rec.first_solution_iteration + offset)
                ratios.append(cost / base)
            rows.append({
                "planner": planner,
                "checkpoint": offset,
                "count": len(ratios),
                "excluded": excluded,
                "mean_ratio": float(np.mean(ratios)) if ratios else float("nan"),
            })
    return rows


def _confidence95(values) -> tuple[float, float, float]:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return float("nan"), float("nan"), float("nan")
    mean = float(values.mean())
    if values.size == 1:
        return mean, mean, mean
    half = 1.96 * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean, mean - half, mean + half


# --- run matrix -------------------------------------------------------------


@dataclass(frozen=True)
class BenchCell:
    problem_id: str
    planner: str
    seed_index: int

    @property
    def cell_id(self) -> str:
        return f"{self.problem_id}|{self.planner}|{self.seed_index}"


def _family_of(problem_id: str) -> str:
    return problem_id.rsplit("_", 1)[0]


def build_provider(spec: str, problem: ProblemInstance, cfg: PlannerConfig):
    if spec == "oracle":
        return OracleGuidanceProvider(problem, eta=cfg.step_size)
    if spec.startswith("remote"):
        url = spec.split(":", 1)[1] if ":" in spec else ""
        url = os.environ.get(PROVIDER_URL_ENV, url)
        if not url:
            raise PlanningError("remote provider needs a URL (or NIRRT_PROVIDER_URL)")
        return RemoteGuidanceProvider(url, timeout=cfg.provider_timeout)
    raise PlanningError(f"unknown provider spec {spec!r}")


def _problem_context(problem_id: str, problem: ProblemInstance) -> dict:
    family = _family_of(problem_id)
    context = {"family": family}
    if family == "center-block":
        context["optimal_cost"] = center_block_optimal_cost(problem)
    elif family == "narrow-passage":
        meta = narrow_passage_meta(problem)
        context["optimal_cost"] = meta["optimal_cost"]
        context["flanking_cost"] = meta["flanking_cost"]
    return context


def run_cell(cell: BenchCell, problem: ProblemInstance, cfg: PlannerConfig,
             provider_spec: str, context: dict) -> dict:
    rng = RngHandle(derive_seed(cell.problem_id, cell.seed_index))
    variant = VARIANTS[cell.planner]
    provider = build_provider(provider_spec, problem, cfg) if variant.guidance else None
    try:
        _, record, _ = plan(problem, variant, cfg, rng, provider=provider,
                            problem_id=cell.problem_id)
        line = record.to_json()
        line["ok"] = True
    except Exception as exc:  # a failed cell must not abort the matrix
        line = {"planner": cell.planner, "problem": cell.problem_id,
                "seed": rng.seed, "ok": False, "error": str(exc)}
    line["cell_id"] = cell.cell_id
    line["seed_index"] = cell.seed_index
    line.update(context)
    return line


def _run_cell_task(args):
    return run_cell(*args)


def _strip_wall_time(line: dict) -> dict:
    return {k: v for k, v in line.items() if k != "wall_time_s"}


def run_matrix(corpus_dir: str | Path, planners: list[str], seeds: int,
               out_dir: str | Path, iterations: int | None = None,
               provider_spec: str = "oracle", workers: int = 1,
               alpha: float | None = None) -> Path:
    """Execute every (problem x planner x seed) cell, resumably.

    Existing result lines are kept; only missing cells run. On completion
    the results file is rewritten in canonical cell order and summary.csv
    is regenerated, so identical inputs give identical outputs (wall-time
    fields aside).
    """
    corpus_dir = Path(corpus_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.jsonl"

    problems: dict[str, ProblemInstance] = {}
    for path in sorted(corpus_dir.glob("*.json")):
        problems[path.stem] = load_problem(path)
    if not problems:
        raise PlanningError(f"no world files found in {corpus_dir}")
    for name in planners:
        if name not in VARIANTS:
            raise PlanningError(f"unknown planner {name!r}")

    cells = [BenchCell(pid, planner, s)
             for pid in sorted(problems) for planner in planners for s in range(seeds)]

    existing: dict[str, dict] = {}
    if results_path.exists():
        with results_path.open(encoding="utf-8") as fh:
            for raw in fh:
                raw = raw.strip()
                if raw:
                    line = json.loads(raw)
                    existing[line["cell_id"]] = line

    pending = [c for c in cells if c.cell_id not in existing]
    contexts = {pid: _problem_context(pid, prob) for pid, prob in problems.items()}

    def cfg_for(problem: ProblemInstance) -> PlannerConfig:
        overrides = {}
        if iterations is not None:
            overrides["max_iterations"] = iterations
        if alpha is not None:
            overrides["alpha"] = alpha
        return PlannerConfig.for_world(problem.world, **overrides)

    tasks = [(c, problems[c.problem_id], cfg_for(problems[c.problem_id]),
              provider_spec, contexts[c.problem_id]) for c in pending]

    new_lines: dict[str, dict] = {}
    if tasks:
        if workers > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                with results_path.open("a", encoding="utf-8") as fh:
                    for line in pool.map(_run_cell_task, tasks):
                        fh.write(json.dumps(line, sort_keys=True) + "\n")
                        fh.flush()
                        new_lines[line["cell_id"]] = line
        else:
            with results_path.open("a", encoding="utf-8") as fh:
                for task in tasks:
                    line = _run_cell_task(task)
                    fh.write(json.dumps(line, sort_keys=True) + "\n")
                    fh.flush()
                    new_lines[line["cell_id"]] = line

    existing.update(new_lines)
    with results_path.open("w", encoding="utf-8") as fh:
        for cell in cells:
            line = existing.get(cell.cell_id)
            if line is not None:
                fh.write(json.dumps(line, sort_keys=True) + "\n")

    write_summary([existing[c.cell_id] for c in cells if c.cell_id in existing],
                  out_dir / "summary.csv")
    return results_path


# --- reporting --------------------------------------------------------------


def _finite(values):
    return [v for v in values if v is not None and math.isfinite(v)]


def _median_with_missing(values):
    """Median treating missing entries as +inf (never reached)."""
    filled = [float("inf") if v is None else float(v) for v in values]
    return float(np.median(filled)) if filled else float("nan")


def summarize(lines: list[dict]) -> list[dict]:
    rows = []
    lines = [ln for ln in lines if ln.get("ok")]
    groups: dict[tuple[str, str], list[dict]] = {}
    for line in lines:
        groups.setdefault((line["family"], line["planner"]), []).append(line)

    for (family, planner), group in sorted(groups.items()):
        records = [RunRecord.from_json(line) for line in group]
        finals = _finite([rec.final_cost for rec in records])
        mean, lo, hi = _confidence95(finals)
        rows.append({"family": family, "planner": planner, "metric": "final_cost",
                     "n": len(records), "n_reached": len(finals),
                     "mean": mean, "ci95_lo": lo, "ci95_hi": hi,
                     "median": float(np.median(finals)) if finals else float("nan")})

        firsts = [rec.first_solution_iteration for rec in records]
        reached = _finite(firsts)
        mean, lo, hi = _confidence95(reached)
        rows.append({"family": family, "planner": planner, "metric": "initial_solution_iters",
                     "n": len(records), "n_reached": len(reached),
                     "mean": mean, "ci95_lo": lo, "ci95_hi": hi,
                     "median": _median_with_missing(firsts)})

        if family == "center-block":
            iters = [metric_iters_to_threshold(rec, line["optimal_cost"], 0.02)
                     for rec, line in zip(records, group)]
            reached = _finite(iters)
            mean, lo, hi = _confidence95(reached)
            rows.append({"family": family, "planner": planner, "metric": "iters_to_2pct",
                         "n": len(records), "n_reached": len(reached),
                         "mean": mean, "ci95_lo": lo, "ci95_hi": hi,
                         "median": _median_with_missing(iters)})
        if family == "narrow-passage":
            iters = [metric_through_gap(rec, line["flanking_cost"])
                     for rec, line in zip(records, group)]
            reached = _finite(iters)
            mean, lo, hi = _confidence95(reached)
            rows.append({"family": family, "planner": planner, "metric": "iters_to_through_gap",
                         "n": len(records), "n_reached": len(reached),
                         "mean": mean, "ci95_lo": lo, "ci95_hi": hi,
                         "median": _median_with_missing(iters)})

    for family in sorted({line["family"] for line in lines}):
        if family not in ("random2d", "random3d"):
            continue
        records = [RunRecord.from_json(line) for line in lines if line["family"] == family]
        for row in metric_relative_cost(records):
            rows.append({"family": family, "planner": row["planner"],
                         "metric": f"relative_cost@{row['checkpoint']}",
                         "n": row["count"] + row["excluded"], "n_reached": row["count"],
                         "mean": row["mean_ratio"], "ci95_lo": float("nan"),
                         "ci95_hi": float("nan"), "median": float("nan")})
    return rows


_SUMMARY_FIELDS = ("family", "planner", "metric", "n", "n_reached",
                   "mean", "ci95_lo", "ci95_hi", "median")


def _format_cell(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf"
        return f"{value:.6g}"
    return str(value)


def write_summary(lines: list[dict], out_csv: str | Path) -> None:
    rows = summarize(lines)
    with Path(out_csv).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=_SUMMARY_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _format_cell(row[k]) for k in _SUMMARY_FIELDS})


def report(results_dir: str | Path, out_csv: str | Path) -> None:
    results_path = Path(results_dir) / "results.jsonl"
    lines = []
    with results_path.open(encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if raw:
                lines.append(json.loads(raw))
    write_summary(lines, out_csv)


# --- training data ----------------------------------------------------------


def make_training_record(problem: ProblemInstance, cfg: PlannerConfig, rng: RngHandle) -> dict:
    """One JSON-lines record: world, free-space cloud, labels, grid path.

    Labels mark cloud points within the step-size radius of the grid A*
    optimal path between the problem's endpoints.
    """
    grid = rasterize(problem.world)
    start_cell = nearest_free_cell(grid, problem.start)
    goal_cell = nearest_free_cell(grid, problem.goal)
    if start_cell is None or goal_cell is None:
        raise PlanningError("start or goal unreachable on the label grid")
    result = astar(grid, grid.centers_of(np.array(start_cell))[0],
                   grid.centers_of(np.array(goal_cell))[0])
    if result is None:
        raise PlanningError("no grid path between start and goal")
    cells, _ = result
    cloud = point_cloud_sampling(problem.world, cfg.cloud_size, rng,
                                 oversample_factor=cfg.oversample_factor)
    labels = label_guidance(grid, cells, cloud.points, cfg.step_size)
    return {
        "world": problem_to_json(problem),
        "points": [[round(float(v), 6) for v in p] for p in cloud.points],
        "labels": [int(v) for v in labels],
        "path": [list(c) for c in cells],
    }
