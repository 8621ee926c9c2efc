"""Planner variants sharing one extend/rewire loop.

All six benchmark planners run the same tree-growth skeleton and differ
only in how the random sample is produced: plain uniform, informed
(ellipsoid once a solution exists), and/or a 50/50 mixture with uniform
draws from the current guidance state set. Guidance can be re-inferred
whenever the best cost improves by more than the configured ratio.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import PlannerConfig
from .errors import GuidanceUnavailableError
from .geometry import State, distance
from .guidance import GuidanceProvider, GuidanceSet, pointnet_guide
from .informed import InformedSet, informed_or_uniform
from .rng import RngHandle
from .tree import Tree, extend_and_rewire, in_goal_region, solution_cost
from .world import ProblemInstance, collision_free_segment, sample_free


@dataclass(frozen=True)
class PlannerVariant:
    name: str
    informed: bool = False     # sample from the focus ellipsoid once a solution exists
    guidance: bool = False     # mix in uniform draws from the guidance set
    focus: bool = False        # constrain the guidance cloud to the focus set
    connect: bool = False      # iterate guidance inference until BFS-connected
    retrigger: bool = False    # re-infer guidance when cost improves enough


VARIANTS: dict[str, PlannerVariant] = {
    "rrt-star": PlannerVariant("rrt-star"),
    "irrt-star": PlannerVariant("irrt-star", informed=True),
    "nrrt-png": PlannerVariant("nrrt-png", guidance=True),
    "nirrt-png": PlannerVariant("nirrt-png", informed=True, guidance=True, retrigger=True),
    "nirrt-png-f": PlannerVariant("nirrt-png-f", informed=True, guidance=True, focus=True,
                                  retrigger=True),
    "nirrt-png-fc": PlannerVariant("nirrt-png-fc", informed=True, guidance=True, focus=True,
                                   connect=True, retrigger=True),
}


@dataclass
class RunRecord:
    """Per-run cost trace and event log.

    Trace entries are (iterations completed, best cost) recorded whenever
    the best cost improves; it is non-increasing by construction. Events
    are (iteration, name) pairs.
    """

    planner: str
    problem_id: str
    seed: int
    iterations: int
    trace: list[tuple[int, float]] = field(default_factory=list)
    events: list[tuple[int, str]] = field(default_factory=list)
    final_cost: float = float("inf")
    first_solution_iteration: int | None = None
    wall_time_s: float = 0.0
    path: list[list[float]] | None = None

    def cost_at(self, iteration: int) -> float:
        """Best cost known after `iteration` iterations (step function)."""
        cost = float("inf")
        for it, c in self.trace:
            if it > iteration:
                break
            cost = c
        return cost

    def to_json(self) -> dict:
        return {
            "planner": self.planner,
            "problem": self.problem_id,
            "seed": self.seed,
            "iterations": self.iterations,
            "trace": [[it, c] for it, c in self.trace],
            "events": [[it, name] for it, name in self.events],
            "final_cost": self.final_cost,
            "first_solution_iteration": self.first_solution_iteration,
            "wall_time_s": self.wall_time_s,
            "path": self.path,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RunRecord":
        rec = cls(
            planner=doc["planner"],
            problem_id=doc["problem"],
            seed=doc["seed"],
            iterations=doc["iterations"],
            trace=[(int(it), float(c)) for it, c in doc["trace"]],
            events=[(int(it), str(name)) for it, name in doc["events"]],
            final_cost=float(doc["final_cost"]),
            first_solution_iteration=doc["first_solution_iteration"],
            wall_time_s=float(doc["wall_time_s"]),
        )
        rec.path = doc.get("path")
        return rec


@dataclass
class NirrtState:
    """Mutable sampling state threaded through the planner loop."""

    variant: PlannerVariant
    c_best: float = float("inf")
    c_update: float = float("inf")
    guide: GuidanceSet | None = None
    guidance_ok: bool = False
    base_branch_draws: int = 0
    guide_branch_draws: int = 0
    retrigger_iterations: list[int] = field(default_factory=list)


def _informed_set_or_none(state: NirrtState, problem: ProblemInstance) -> InformedSet | None:
    if not np.isfinite(state.c_best):
        return None
    c_min = distance(problem.start, problem.goal)
    return InformedSet(problem.start, problem.goal, max(state.c_best, c_min))


def pointnet_guided_sampling(state: NirrtState, problem: ProblemInstance,
                             provider: GuidanceProvider | None, cfg: PlannerConfig,
                             rng: RngHandle, iteration: int = 0) -> State:
    """One sample of the mixed strategy, updating guidance state in place.

    Re-infers the guidance set when the best cost dropped below
    alpha * (cost at last inference). The informed/uniform branch keeps
    probability 0.5 every draw, which preserves probabilistic completeness
    and asymptotic optimality; an empty guidance set falls through to that
    branch instead of resampling.
    """
    variant = state.variant
    if (state.guidance_ok and variant.retrigger
            and state.c_best < cfg.alpha * state.c_update):
        try:
            result = pointnet_guide(problem, state.c_best, provider, cfg, rng,
                                    use_focus=variant.focus, use_connect=variant.connect)
            state.guide = result.guide
            state.c_update = state.c_best
            state.retrigger_iterations.append(iteration)
        except GuidanceUnavailableError:
            state.guidance_ok = False

    use_guide_branch = False
    if state.guidance_ok:
        use_guide_branch = bool(rng.np.random() >= 0.5)
    if use_guide_branch:
        state.guide_branch_draws += 1
        if state.guide is not None and len(state.guide):
            pick = int(rng.np.integers(len(state.guide)))
            return state.guide.points[pick].copy()
        # Empty guidance set: fall through to the informed/uniform branch.
    else:
        state.base_branch_draws += 1

    if variant.informed:
        focus = _informed_set_or_none(state, problem)
        return informed_or_uniform(focus, problem.world, rng)
    return sample_free(problem.world, rng)


def plan(problem: ProblemInstance, variant: PlannerVariant | str, cfg: PlannerConfig,
         rng: RngHandle, provider: GuidanceProvider | None = None,
         problem_id: str = "", cost_target: float | None = None):
    """Run one planner for cfg.max_iterations iterations.

    Returns (tree, record, state). When cost_target is given the loop stops
    early once the best cost reaches it (the trace and metrics derived from
    it are unaffected; only later iterations are skipped).
    """
    if isinstance(variant, str):
        variant = VARIANTS[variant]
    started = time.perf_counter()
    record = RunRecord(planner=variant.name, problem_id=problem_id, seed=rng.seed,
                       iterations=cfg.max_iterations)
    tree = Tree(problem.start)
    soln: set[int] = set()
    state = NirrtState(variant=variant)
    state.guidance_ok = variant.guidance and provider is not None

    if state.guidance_ok:
        try:
            result = pointnet_guide(problem, float("inf"), provider, cfg, rng,
                                    use_focus=variant.focus, use_connect=variant.connect)
            state.guide = result.guide
            record.events.append((0, "guidance"))
        except GuidanceUnavailableError:
            state.guidance_ok = False
            record.events.append((0, "guidance_unavailable"))

    completed = 0
    for i in range(1, cfg.max_iterations + 1):
        c_now = solution_cost(tree, soln, problem.goal)
        if c_now < state.c_best:
            if not np.isfinite(state.c_best):
                record.first_solution_iteration = completed
                record.events.append((completed, "first_solution"))
            state.c_best = c_now
            record.trace.append((completed, c_now))
        if cost_target is not None and state.c_best <= cost_target:
            record.events.append((completed, "cost_target_reached"))
            break

        before = len(state.retrigger_iterations)
        x_rand = pointnet_guided_sampling(state, problem, provider, cfg, rng, iteration=i)
        if len(state.retrigger_iterations) > before:
            record.events.append((i, "retrigger"))
        if not state.guidance_ok and variant.guidance and provider is not None:
            if not any(name == "guidance_unavailable" for _, name in record.events):
                record.events.append((i, "guidance_unavailable"))

        new_idx = extend_and_rewire(tree, x_rand, problem.world, cfg)
        completed = i
        if new_idx is not None and in_goal_region(tree.state(new_idx), problem.goal, cfg):
            soln.add(new_idx)

    c_final = solution_cost(tree, soln, problem.goal)
    if c_final < state.c_best:
        if not np.isfinite(state.c_best):
            record.first_solution_iteration = completed
            record.events.append((completed, "first_solution"))
        state.c_best = c_final
        record.trace.append((completed, c_final))
    record.final_cost = state.c_best
    record.iterations = completed
    record.path = _best_path(tree, soln, problem, cfg)
    record.wall_time_s = time.perf_counter() - started
    return tree, record, state


def _best_path(tree: Tree, soln: set[int], problem: ProblemInstance, cfg: PlannerConfig):
    if not soln:
        return None
    idx = np.fromiter(soln, dtype=np.int64)
    totals = tree.costs[idx] + np.linalg.norm(tree.points[idx] - problem.goal, axis=1)
    best = int(idx[int(np.argmin(totals))])
    path = tree.path_to(best)
    if collision_free_segment(problem.world, path[-1], problem.goal, cfg.collision_resolution):
        path.append(problem.goal.copy())
    return [p.tolist() for p in path]


def rrt_star(problem: ProblemInstance, cfg: PlannerConfig, rng: RngHandle, **kwargs):
    return plan(problem, VARIANTS["rrt-star"], cfg, rng, **kwargs)


def irrt_star(problem: ProblemInstance, cfg: PlannerConfig, rng: RngHandle, **kwargs):
    return plan(problem, VARIANTS["irrt-star"], cfg, rng, **kwargs)


def nirrt_star(problem: ProblemInstance, provider: GuidanceProvider, cfg: PlannerConfig,
               rng: RngHandle, **kwargs):
    return plan(problem, VARIANTS["nirrt-png-fc"], cfg, rng, provider=provider, **kwargs)
