"""Generators for the benchmark problem families.

Four families: center block (one rectangular obstacle between a fixed
start-goal pair, five map sizes), narrow passage (a thick wall pierced by
a gap at a random height, flankable around its ends), and 2D/3D random
worlds (box/ball clutter with grid-verified feasibility). Generators are
pure functions of their RngHandle, so corpora replay byte-identically.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolationError, GenerationError, InfeasibleSpaceError
from .grid import grid_path_exists, rasterize
from .rng import RngHandle, derive_seed
from .visibility import shortest_path_cost
from .world import Ball, Box, ProblemInstance, World, sample_free

START_GOAL_SEPARATION = 100.0
CENTER_BLOCK_MAP_WIDTHS = (110.0, 130.0, 150.0, 170.0, 190.0)
CENTER_BLOCK_HEIGHT_RANGE = (30.0, 90.0)
CENTER_BLOCK_WIDTH_RANGE = (10.0, 90.0)

WORLD_SIDE_2D = 224.0
WORLD_SIDE_3D = 50.0
CLEARANCE_2D = 3.0
CLEARANCE_3D = 2.0

NARROW_GAP_HEIGHTS = (6.0, 8.0, 10.0, 12.0, 14.0)
_WALL_X = (107.0, 117.0)       # 10 units thick, centered between start and goal
_WALL_Y = (20.0, 204.0)        # leaves 20-unit flanking corridors top and bottom
_GAP_CENTER_RANGE = (60.0, 164.0)
_NP_START = (32.0, 112.0)
_NP_GOAL = (192.0, 112.0)

_REGEN_ATTEMPTS = 100


def gen_center_block(map_width: float, block_width: float, rng: RngHandle) -> ProblemInstance:
    """Square world with one block centered on the start-goal midpoint.

    Start and goal sit on the horizontal midline at the fixed separation;
    the block height is drawn uniformly. Zero clearance, so the optimum
    hugs the block corners.
    """
    if block_width >= START_GOAL_SEPARATION:
        raise ContractViolationError(
            f"block width {block_width} must stay below the start-goal distance")
    if map_width < START_GOAL_SEPARATION:
        raise ContractViolationError(
            f"map width {map_width} must cover the start-goal distance")
    height = rng.np.uniform(*CENTER_BLOCK_HEIGHT_RANGE)
    if height >= map_width:
        raise GenerationError(f"block height {height} leaves no path in map {map_width}")
    c = map_width / 2.0
    obstacles = []
    if block_width > 0:
        obstacles.append(Box((c - block_width / 2.0, c - height / 2.0),
                             (c + block_width / 2.0, c + height / 2.0)))
    world = World((0.0, 0.0), (map_width, map_width), obstacles, clearance=0.0)
    start = np.array([c - START_GOAL_SEPARATION / 2.0, c])
    goal = np.array([c + START_GOAL_SEPARATION / 2.0, c])
    return ProblemInstance(world, start, goal)


def center_block_optimal_cost(problem: ProblemInstance) -> float:
    return shortest_path_cost(problem.world, problem.start, problem.goal)


def gen_narrow_passage(gap_height: float, rng: RngHandle) -> ProblemInstance:
    """Thick wall with one gap at a seeded random height.

    The wall stops short of the world edges, so a longer flanking route
    always exists; the gap, when present, offers the strictly shorter
    path. Zero clearance.
    """
    wall_height = _WALL_Y[1] - _WALL_Y[0]
    if not 0.0 < gap_height < wall_height:
        raise ContractViolationError(
            f"gap height must be in (0, {wall_height}), got {gap_height}")
    lo = max(_GAP_CENTER_RANGE[0], _WALL_Y[0] + gap_height / 2.0 + 1.0)
    hi = min(_GAP_CENTER_RANGE[1], _WALL_Y[1] - gap_height / 2.0 - 1.0)
    if lo <= hi:
        gap_center = rng.np.uniform(lo, hi)
    else:
        gap_center = (_WALL_Y[0] + _WALL_Y[1]) / 2.0
    gap_lo = gap_center - gap_height / 2.0
    gap_hi = gap_center + gap_height / 2.0
    obstacles = []
    if gap_lo > _WALL_Y[0]:
        obstacles.append(Box((_WALL_X[0], _WALL_Y[0]), (_WALL_X[1], gap_lo)))
    if gap_hi < _WALL_Y[1]:
        obstacles.append(Box((_WALL_X[0], gap_hi), (_WALL_X[1], _WALL_Y[1])))
    world = World((0.0, 0.0), (WORLD_SIDE_2D, WORLD_SIDE_2D), obstacles, clearance=0.0)
    return ProblemInstance(world, np.array(_NP_START), np.array(_NP_GOAL))


def narrow_passage_meta(problem: ProblemInstance) -> dict:
    """Gap region, flanking cost and true optimum, reconstructed from the world.

    The flanking cost is the shortest path with the gap sealed; beating it
    strictly certifies a route through the passage.
    """
    walls = sorted((o for o in problem.world.obstacles if isinstance(o, Box)),
                   key=lambda b: float(b.lo[1]))
    if len(walls) == 2:
        gap_lo, gap_hi = float(walls[0].hi[1]), float(walls[1].lo[1])
    elif len(walls) == 1:
        gap_lo = gap_hi = float("nan")
    else:
        gap_lo, gap_hi = _WALL_Y
    sealed = World(problem.world.lo, problem.world.hi,
                   [Box((_WALL_X[0], _WALL_Y[0]), (_WALL_X[1], _WALL_Y[1]))], clearance=0.0)
    flanking = shortest_path_cost(sealed, problem.start, problem.goal)
    optimal = shortest_path_cost(problem.world, problem.start, problem.goal)
    return {
        "gap_lo": gap_lo,
        "gap_hi": gap_hi,
        "gap_x": _WALL_X,
        "flanking_cost": flanking,
        "optimal_cost": optimal,
    }


def _feasible(problem: ProblemInstance) -> bool:
    grid = rasterize(problem.world)
    return grid_path_exists(grid, problem.start, problem.goal)


def _gen_random_world(rng: RngHandle, side: float, clearance: float, dim: int,
                      box_count: tuple[int, int], box_side: tuple[float, float],
                      ball_count: tuple[int, int], ball_radius: tuple[float, float]) -> ProblemInstance:
    lo = np.zeros(dim)
    hi = np.full(dim, side)
    for _ in range(_REGEN_ATTEMPTS):
        obstacles: list = []
        for _ in range(int(rng.np.integers(box_count[0], box_count[1] + 1))):
            sides = rng.np.uniform(box_side[0], box_side[1], size=dim)
            corner = rng.np.uniform(0.0, side - sides)
            obstacles.append(Box(corner, corner + sides))
        for _ in range(int(rng.np.integers(ball_count[0], ball_count[1] + 1))):
            radius = float(rng.np.uniform(*ball_radius))
            center = rng.np.uniform(radius, side - radius, size=dim)
            obstacles.append(Ball(center, radius))
        world = World(lo, hi, obstacles, clearance=clearance)
        try:
            start = sample_free(world, rng, budget=10_000)
            goal = sample_free(world, rng, budget=10_000)
        except InfeasibleSpaceError:
            continue
        if np.array_equal(start, goal):
            continue
        problem = ProblemInstance(world, start, goal)
        if _feasible(problem):
            return problem
    raise GenerationError(f"no feasible random world after {_REGEN_ATTEMPTS} attempts")


def gen_random_world_2d(rng: RngHandle) -> ProblemInstance:
    return _gen_random_world(rng, WORLD_SIDE_2D, CLEARANCE_2D, 2,
                             box_count=(10, 20), box_side=(10.0, 50.0),
                             ball_count=(5, 10), ball_radius=(5.0, 25.0))


def gen_random_world_3d(rng: RngHandle) -> ProblemInstance:
    return _gen_random_world(rng, WORLD_SIDE_3D, CLEARANCE_3D, 3,
                             box_count=(8, 15), box_side=(5.0, 15.0),
                             ball_count=(4, 8), ball_radius=(3.0, 8.0))


FAMILIES = ("center-block", "narrow-passage", "random2d", "random3d")


def generate_instance(family: str, index: int, seed: int) -> tuple[str, ProblemInstance]:
    """Deterministic instance `index` of a corpus rooted at `seed`."""
    rng = RngHandle(derive_seed(family, seed, index))
    if family == "center-block":
        width = CENTER_BLOCK_MAP_WIDTHS[index % len(CENTER_BLOCK_MAP_WIDTHS)]
        block_width = float(rng.np.uniform(*CENTER_BLOCK_WIDTH_RANGE))
        problem = gen_center_block(width, block_width, rng)
    elif family == "narrow-passage":
        gap = NARROW_GAP_HEIGHTS[index % len(NARROW_GAP_HEIGHTS)]
        problem = gen_narrow_passage(gap, rng)
    elif family == "random2d":
        problem = gen_random_world_2d(rng)
    elif family == "random3d":
        problem = gen_random_world_3d(rng)
    else:
        raise ContractViolationError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return f"{family}_{seed + index}", problem
