"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Heavy planner matrices run paired seeds across two worker processes; every
tolerance and budget is pinned here, not configurable.
"""

import concurrent.futures
import json
import math
import os
import time

import numpy as np
import pytest
from scipy.spatial import cKDTree

import nirrt
from nirrt.bench import metric_iters_to_threshold, metric_through_gap, run_matrix
from nirrt.config import PlannerConfig
from nirrt.grid import OccupancyGrid, OracleGuidanceProvider, astar
from nirrt.guidance import pointnet_guide
from nirrt.informed import InformedSet
from nirrt.planners import NirrtState, PlannerVariant, plan, pointnet_guided_sampling
from nirrt.problems import (
    CENTER_BLOCK_MAP_WIDTHS,
    center_block_optimal_cost,
    gen_center_block,
    gen_narrow_passage,
    generate_instance,
    narrow_passage_meta,
)
from nirrt.rng import derive_seed
from nirrt.world import problem_from_json, problem_to_json, save_problem

from .oracles import dijkstra_grid_path, path_step_counts
from .test_guidance import LocalityLimitedProvider

_WORKERS = min(os.cpu_count() or 1, 2)


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _median_with_inf(values) -> float:
    return float(np.median([math.inf if v is None else float(v) for v in values]))


# --- criterion 1: grid search oracle equivalence -----------------------------


def test_oracle_equivalence_astar_dijkstra():
    started = time.perf_counter()
    rng = nirrt.RngHandle(derive_seed("acceptance", "astar"))
    checked = 0
    for dims, cases in (((32, 32), 200), ((16, 16, 16), 50)):
        for _ in range(cases):
            occupied = rng.np.random(dims) < float(rng.np.uniform(0.1, 0.45))
            free_cells = np.argwhere(~occupied)
            if len(free_cells) < 2:
                continue
            pick = rng.np.integers(len(free_cells), size=2)
            start, goal = map(tuple, free_cells[pick])
            grid = OccupancyGrid(1.0, np.zeros(len(dims)), occupied, 0)
            mine = astar(grid, grid.centers_of(np.array(start))[0],
                         grid.centers_of(np.array(goal))[0])
            reference = dijkstra_grid_path(occupied, start, goal)
            if reference is None:
                assert mine is None
            else:
                assert mine is not None
                # Equal step-count triples == exactly equal real costs.
                assert path_step_counts(mine[0]) == path_step_counts(reference[1])
                assert mine[1] == pytest.approx(reference[0], abs=1e-9)
            checked += 1
    elapsed = time.perf_counter() - started
    _criterion("oracle-equivalence", elapsed < 60.0,
               f"{checked} grids, A* == Dijkstra exactly, {elapsed:.1f}s (< 60s)")


# --- criterion 2: informed set invariants ------------------------------------


def test_informed_set_invariants():
    started = time.perf_counter()
    start, goal = np.array([62.0, 112.0]), np.array([162.0, 112.0])
    focus = InformedSet(start, goal, 125.0)
    samples = focus.sample_batch(100_000, nirrt.RngHandle(2))
    membership = bool(focus.contains_many(samples).all())

    ortho_ok = True
    rng = nirrt.RngHandle(3)
    for d in (2, 3):
        for _ in range(100):
            a = rng.np.uniform(-100, 100, d)
            b = rng.np.uniform(-100, 100, d)
            s = InformedSet(a, b, float(np.linalg.norm(b - a)) * 1.2 + 1.0)
            ortho_ok &= bool(np.abs(s.rotation @ s.rotation.T - np.eye(d)).max() <= 1e-9)
            ortho_ok &= abs(float(np.linalg.det(s.rotation)) - 1.0) <= 1e-9

    nested_ok = True
    for c_small, c_large in ((105.0, 110.0), (110.0, 125.0), (125.0, 150.0)):
        small = InformedSet(start, goal, c_small)
        large = InformedSet(start, goal, c_large)
        nested_ok &= bool(large.contains_many(small.sample_batch(20_000, rng)).all())

    elapsed = time.perf_counter() - started
    ok = membership and ortho_ok and nested_ok and elapsed < 10.0
    _criterion("informed-set-invariants", ok,
               f"membership 100%={membership}, orthonormal={ortho_ok}, "
               f"nested={nested_ok}, {elapsed:.1f}s (< 10s)")


# --- criterion 3: RRT* asymptotic-optimality smoke ---------------------------


def _rrt_smoke_run(seed: int) -> float:
    problem = nirrt.ProblemInstance(
        nirrt.World((0.0, 0.0), (224.0, 224.0), [], clearance=0.0),
        np.array([20.0, 112.0]), np.array([204.0, 112.0]))
    cfg = PlannerConfig.for_world(problem.world, max_iterations=3000)
    _, record, _ = nirrt.rrt_star(problem, cfg, nirrt.RngHandle(derive_seed("smoke", seed)))
    return record.final_cost


def test_rrt_star_optimality_smoke():
    started = time.perf_counter()
    with concurrent.futures.ProcessPoolExecutor(max_workers=_WORKERS) as pool:
        finals = list(pool.map(_rrt_smoke_run, range(50)))
    ratio = float(np.median(finals)) / 184.0
    elapsed = time.perf_counter() - started
    ok = ratio <= 1.05 and elapsed < 300.0
    _criterion("rrt-star-optimality-smoke", ok,
               f"median final / straight-line = {ratio:.4f} (<= 1.05) over 50 seeds, "
               f"{elapsed:.0f}s (< 300s)")


# --- criterion 4: IRRT* beats RRT* on center block ---------------------------


def _center_block_cell(args):
    width, seed_index, planner = args
    rng = nirrt.RngHandle(derive_seed("cb-inst", width, seed_index))
    block_width = float(rng.np.uniform(10.0, 90.0))
    problem = gen_center_block(width, block_width, rng)
    c_opt = center_block_optimal_cost(problem)
    cfg = PlannerConfig.for_world(problem.world, max_iterations=3000)
    run_rng = nirrt.RngHandle(derive_seed("cb-run", width, seed_index))
    _, record, _ = plan(problem, planner, cfg, run_rng, cost_target=1.02 * c_opt)
    return width, seed_index, planner, metric_iters_to_threshold(record, c_opt, 0.02)


def test_irrt_beats_rrt_on_center_block():
    started = time.perf_counter()
    tasks = [(w, s, p) for w in CENTER_BLOCK_MAP_WIDTHS for s in range(20)
             for p in ("rrt-star", "irrt-star")]
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=_WORKERS) as pool:
        for width, seed_index, planner, iters in pool.map(_center_block_cell, tasks):
            results.setdefault((width, planner), []).append(iters)
    lines = []
    ok = True
    for width in CENTER_BLOCK_MAP_WIDTHS:
        med_rrt = _median_with_inf(results[(width, "rrt-star")])
        med_irrt = _median_with_inf(results[(width, "irrt-star")])
        ok &= med_irrt < med_rrt
        lines.append(f"w{width:.0f}: irrt {med_irrt:.0f} vs rrt {med_rrt:.0f}")
    elapsed = time.perf_counter() - started
    ok &= elapsed < 900.0
    _criterion("irrt-beats-rrt-center-block", ok,
               "median iters to 2% of optimum -- " + "; ".join(lines)
               + f"; {elapsed:.0f}s (< 900s)")


# --- criterion 5: NIRRT*-PNG(FC) beats IRRT* on narrow passage ---------------


def _narrow_passage_cell(args):
    gap, seed_index, planner = args
    problem = gen_narrow_passage(gap, nirrt.RngHandle(derive_seed("np-inst", gap, seed_index)))
    meta = narrow_passage_meta(problem)
    cfg = PlannerConfig.for_world(problem.world, max_iterations=3000)
    provider = OracleGuidanceProvider(problem, eta=cfg.step_size) if planner != "irrt-star" else None
    run_rng = nirrt.RngHandle(derive_seed("np-run", gap, seed_index))
    _, record, _ = plan(problem, planner, cfg, run_rng, provider=provider,
                        cost_target=meta["flanking_cost"] - 1e-9)
    return gap, seed_index, planner, metric_through_gap(record, meta["flanking_cost"])


def test_nirrt_beats_irrt_on_narrow_passage():
    started = time.perf_counter()
    gaps = (6.0, 8.0, 10.0, 12.0, 14.0)
    tasks = [(g, s, p) for g in gaps for s in range(20)
             for p in ("irrt-star", "nirrt-png-fc")]
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=_WORKERS) as pool:
        for gap, seed_index, planner, iters in pool.map(_narrow_passage_cell, tasks):
            results.setdefault((gap, planner), []).append(iters)
    lines = []
    ok = True
    for gap in gaps:
        med_irrt = _median_with_inf(results[(gap, "irrt-star")])
        med_nirrt = _median_with_inf(results[(gap, "nirrt-png-fc")])
        if gap <= 10.0:
            ok &= med_nirrt < med_irrt
        lines.append(f"gap{gap:.0f}: nirrt {med_nirrt:.0f} vs irrt {med_irrt:.0f}")
    elapsed = time.perf_counter() - started
    ok &= elapsed < 1200.0
    _criterion("nirrt-beats-irrt-narrow-passage", ok,
               "median iters to through-gap -- " + "; ".join(lines)
               + f"; {elapsed:.0f}s (< 1200s)")


# --- criterion 6: Neural Connect reaches connectivity ------------------------


def test_neural_connect_property():
    connected = 0
    monotone = True
    multi_round = 0
    for index in range(50):
        _, problem = generate_instance("narrow-passage", index, seed=60)
        cfg = PlannerConfig.for_world(problem.world)
        provider = LocalityLimitedProvider(radius=50.0)
        result = pointnet_guide(problem, float("inf"), provider, cfg,
                                nirrt.RngHandle(derive_seed("connect", index)))
        connected += result.connected
        if provider.calls >= 2:
            multi_round += 1
        forward = [r.score for r in result.rounds
                   if r.direction == "forward" and r.endpoint is not None]
        backward = [r.score for r in result.rounds
                    if r.direction == "backward" and r.endpoint is not None]
        monotone &= all(a < b for a, b in zip(forward, forward[1:]))
        monotone &= all(a < b for a, b in zip(backward, backward[1:]))
    ok = connected >= 45 and monotone and multi_round > 0
    _criterion("neural-connect", ok,
               f"connected {connected}/50 within 5 rounds (>= 45), "
               f"endpoint scores strictly increasing: {monotone}, "
               f"multi-round instances: {multi_round}")


# --- criterion 7: Neural Focus containment and density -----------------------


def test_neural_focus_containment_and_density():
    problem = nirrt.ProblemInstance(
        nirrt.World((0.0, 0.0), (224.0, 224.0), [], clearance=0.0),
        np.array([20.0, 112.0]), np.array([204.0, 112.0]))
    cfg = PlannerConfig.for_world(problem.world)
    c_wide = 240.0
    c_tight = 0.8 * c_wide

    class AllOnes:
        def infer(self, cloud):
            return np.ones(len(cloud))

    containment = True
    decreased = 0
    for seed in range(20):
        wide = pointnet_guide(problem, c_wide, AllOnes(), cfg,
                              nirrt.RngHandle(derive_seed("focus", seed, "w")),
                              use_connect=False)
        tight = pointnet_guide(problem, c_tight, AllOnes(), cfg,
                               nirrt.RngHandle(derive_seed("focus", seed, "t")),
                               use_connect=False)
        containment &= bool(InformedSet(problem.start, problem.goal, c_wide)
                            .contains_many(wide.cloud.points).all())
        containment &= bool(InformedSet(problem.start, problem.goal, c_tight)
                            .contains_many(tight.cloud.points).all())
        d_wide, _ = cKDTree(wide.cloud.points).query(wide.cloud.points, k=2)
        d_tight, _ = cKDTree(tight.cloud.points).query(tight.cloud.points, k=2)
        decreased += d_tight[:, 1].mean() < d_wide[:, 1].mean()
    ok = containment and decreased == 20
    _criterion("neural-focus", ok,
               f"containment 100%: {containment}; nearest-neighbor distance "
               f"shrank in {decreased}/20 paired seeds")


# --- criterion 8: sampling mixture and retrigger bound -----------------------


def test_mixing_statistics_and_retrigger_bound():
    problem = nirrt.ProblemInstance(
        nirrt.World((0.0, 0.0), (224.0, 224.0), [], clearance=0.0),
        np.array([20.0, 112.0]), np.array([204.0, 112.0]))
    cfg = PlannerConfig.for_world(problem.world)
    state = NirrtState(variant=PlannerVariant("mix", guidance=True), guidance_ok=True)
    pts = np.array([[50.0, 50.0], [60.0, 60.0]])
    state.guide = nirrt.GuidanceSet(np.arange(2), pts, np.ones(2))
    rng = nirrt.RngHandle(8)
    n = 10_000
    for _ in range(n):
        pointnet_guided_sampling(state, problem, None, cfg, rng)
    frac = state.guide_branch_draws / n
    mix_ok = 0.48 <= frac <= 0.52

    block = gen_center_block(150.0, 40.0, nirrt.RngHandle(9))
    run_cfg = PlannerConfig.for_world(block.world, max_iterations=2000, alpha=0.9)
    provider = OracleGuidanceProvider(block, eta=run_cfg.step_size)
    _, record, _ = plan(block, "nirrt-png-fc", run_cfg, nirrt.RngHandle(10),
                        provider=provider)
    retriggers = sum(1 for _, name in record.events if name == "retrigger")
    c_first = next(c for _, c in record.trace if math.isfinite(c))
    bound = math.log(c_first / record.final_cost) / math.log(1.0 / 0.9) + 1.0
    bound_ok = retriggers <= bound
    ok = mix_ok and bound_ok
    _criterion("mixing-and-retrigger", ok,
               f"guide-branch frequency {frac:.3f} in [0.48, 0.52]; "
               f"retriggers {retriggers} <= bound {bound:.1f}")


# --- criterion 9: end-to-end determinism -------------------------------------


def test_end_to_end_determinism(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for i in range(2):
        name, problem = generate_instance("center-block", i, seed=1)
        save_problem(problem, corpus / f"{name}.json")
    name, problem = generate_instance("narrow-passage", 0, seed=1)
    save_problem(problem, corpus / f"{name}.json")

    def strip_wall_time(path):
        return [{k: v for k, v in json.loads(line).items() if k != "wall_time_s"}
                for line in path.read_text().splitlines()]

    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        run_matrix(corpus, ["rrt-star", "irrt-star"], seeds=2, out_dir=out, iterations=200)
        outs.append(out)
    summaries_equal = (outs[0] / "summary.csv").read_bytes() == (outs[1] / "summary.csv").read_bytes()
    results_equal = strip_wall_time(outs[0] / "results.jsonl") == strip_wall_time(outs[1] / "results.jsonl")

    # Serialization round trip is part of the determinism story.
    doc = problem_to_json(problem)
    rebuilt = problem_from_json(doc)
    round_trip = problem_to_json(rebuilt) == doc

    ok = summaries_equal and results_equal and round_trip
    _criterion("end-to-end-determinism", ok,
               f"summary.csv byte-identical: {summaries_equal}; results (minus wall time) "
               f"identical: {results_equal}; world JSON round-trips: {round_trip}")
