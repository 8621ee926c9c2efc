"""Obstacle worlds and clearance-aware collision checking.

A state is free when it lies inside the world bounds and its signed
distance to every obstacle surface is at least the world clearance, i.e.
obstacles are inflated by the clearance. Distances are exact Euclidean
(no grid artifacts); the grid module applies its own dilation separately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractViolationError, InfeasibleSpaceError
from .geometry import State, as_state, sample_uniform_box_batch
from .rng import RngHandle

# Collision-check spacing along segments, in world units per dimension.
DEFAULT_COLLISION_RESOLUTION = {2: 0.5, 3: 0.25}

_SAMPLE_FREE_BUDGET = 100_000
_SAMPLE_FREE_CHUNK = 128


@dataclass(frozen=True, eq=False)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", as_state(self.lo))
        object.__setattr__(self, "hi", as_state(self.hi))
        if not np.all(self.lo < self.hi):
            raise ContractViolationError(f"box needs lo < hi componentwise: {self.lo}, {self.hi}")


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_state(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ContractViolationError(f"ball radius must be positive, got {self.radius}")


Obstacle = Box | Ball


def _box_signed_distance(pts: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Signed distance from points (n, d) to boxes (k, d); negative inside."""
    q = np.maximum(lo[None, :, :] - pts[:, None, :], pts[:, None, :] - hi[None, :, :])
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=2)
    inside = np.minimum(q.max(axis=2), 0.0)
    return outside + inside


class World:
    """Immutable bounded world with box/ball obstacles and a clearance margin."""

    def __init__(self, lo, hi, obstacles: list[Obstacle] | None = None, clearance: float = 0.0):
        self.lo = as_state(lo)
        self.hi = as_state(hi)
        if not np.all(self.lo < self.hi):
            raise ContractViolationError(f"world bounds need lo < hi: {self.lo}, {self.hi}")
        self.clearance = float(clearance)
        if self.clearance < 0:
            raise ContractViolationError(f"clearance must be non-negative, got {self.clearance}")
        self.obstacles = list(obstacles or [])
        d = self.dimension
        for obs in self.obstacles:
            if isinstance(obs, Box):
                as_state(obs.lo, d)
                if not self._box_intersects_bounds(obs):
                    raise ContractViolationError(f"obstacle outside bounds: {obs}")
            elif isinstance(obs, Ball):
                as_state(obs.center, d)
                if not self._ball_intersects_bounds(obs):
                    raise ContractViolationError(f"obstacle outside bounds: {obs}")
            else:
                raise ContractViolationError(f"unknown obstacle type: {obs!r}")
        boxes = [o for o in self.obstacles if isinstance(o, Box)]
        balls = [o for o in self.obstacles if isinstance(o, Ball)]
        self._box_lo = np.array([o.lo for o in boxes]).reshape(len(boxes), d)
        self._box_hi = np.array([o.hi for o in boxes]).reshape(len(boxes), d)
        self._ball_c = np.array([o.center for o in balls]).reshape(len(balls), d)
        self._ball_r = np.array([o.radius for o in balls])

    @property
    def dimension(self) -> int:
        return self.lo.shape[0]

    def _box_intersects_bounds(self, box: Box) -> bool:
        return bool(np.all(box.lo <= self.hi) and np.all(box.hi >= self.lo))

    def _ball_intersects_bounds(self, ball: Ball) -> bool:
        q = np.maximum(self.lo - ball.center, ball.center - self.hi)
        return float(np.linalg.norm(np.maximum(q, 0.0))) <= ball.radius

    def obstacle_clearance_many(self, pts: np.ndarray) -> np.ndarray:
        """Minimum signed distance from each point to any obstacle surface.

        Negative values mean the point is inside an obstacle; +inf when the
        world has no obstacles.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        best = np.full(pts.shape[0], np.inf)
        if len(self._box_lo):
            best = np.minimum(best, _box_signed_distance(pts, self._box_lo, self._box_hi).min(axis=1))
        if len(self._ball_c):
            d = np.linalg.norm(pts[:, None, :] - self._ball_c[None, :, :], axis=2) - self._ball_r[None, :]
            best = np.minimum(best, d.min(axis=1))
        return best

    def in_bounds_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def is_free_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        free = self.in_bounds_many(pts)
        if self.obstacles and free.any():
            free &= self.obstacle_clearance_many(pts) >= self.clearance
        return free


def is_free(world: World, x: State) -> bool:
    """True iff x is in bounds and at least `clearance` away from every obstacle."""
    x = as_state(x, world.dimension)
    return bool(world.is_free_many(x[None, :])[0])


def collision_free_segment(world: World, a: State, b: State, resolution: float | None = None) -> bool:
    """Check the segment [a, b] at spacing `resolution` (both endpoints included)."""
    a = as_state(a, world.dimension)
    b = as_state(b, world.dimension)
    if resolution is None:
        resolution = DEFAULT_COLLISION_RESOLUTION[world.dimension]
    length = float(np.linalg.norm(b - a))
    n = max(int(np.ceil(length / resolution)), 1) + 1
    ts = np.linspace(0.0, 1.0, n)
    pts = a[None, :] + ts[:, None] * (b - a)[None, :]
    return bool(world.is_free_many(pts).all())


def sample_free(world: World, rng: RngHandle, budget: int = _SAMPLE_FREE_BUDGET) -> State:
    """Uniform sample over free space by rejection inside the bounds box."""
    drawn = 0
    while drawn < budget:
        chunk = min(_SAMPLE_FREE_CHUNK, budget - drawn)
        pts = sample_uniform_box_batch(world.lo, world.hi, chunk, rng)
        free = world.is_free_many(pts)
        hits = np.flatnonzero(free)
        if hits.size:
            return pts[hits[0]]
        drawn += chunk
    raise InfeasibleSpaceError(f"no free state found in {budget} rejection attempts")


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A world plus validated start and goal states."""

    world: World
    start: State
    goal: State
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        d = self.world.dimension
        object.__setattr__(self, "start", as_state(self.start, d))
        object.__setattr__(self, "goal", as_state(self.goal, d))
        if not is_free(self.world, self.start):
            raise ContractViolationError(f"start {self.start} is not in free space")
        if not is_free(self.world, self.goal):
            raise ContractViolationError(f"goal {self.goal} is not in free space")


# --- JSON serialization (schema version 1) ---------------------------------


def _obstacle_to_json(obs: Obstacle) -> dict:
    if isinstance(obs, Box):
        return {"type": "box", "lo": obs.lo.tolist(), "hi": obs.hi.tolist()}
    return {"type": "ball", "center": obs.center.tolist(), "radius": obs.radius}


def _obstacle_from_json(doc: dict) -> Obstacle:
    if doc["type"] == "box":
        return Box(np.array(doc["lo"]), np.array(doc["hi"]))
    if doc["type"] == "ball":
        return Ball(np.array(doc["center"]), float(doc["radius"]))
    raise ContractViolationError(f"unknown obstacle type {doc['type']!r}")


def problem_to_json(problem: ProblemInstance) -> dict:
    w = problem.world
    return {
        "version": 1,
        "dimension": w.dimension,
        "bounds": {"lo": w.lo.tolist(), "hi": w.hi.tolist()},
        "clearance": w.clearance,
        "obstacles": [_obstacle_to_json(o) for o in w.obstacles],
        "start": problem.start.tolist(),
        "goal": problem.goal.tolist(),
    }


def problem_from_json(doc: dict) -> ProblemInstance:
    if doc.get("version") != 1:
        raise ContractViolationError(f"unsupported world schema version {doc.get('version')!r}")
    world = World(
        lo=np.array(doc["bounds"]["lo"]),
        hi=np.array(doc["bounds"]["hi"]),
        obstacles=[_obstacle_from_json(o) for o in doc["obstacles"]],
        clearance=float(doc["clearance"]),
    )
    return ProblemInstance(world, np.array(doc["start"]), np.array(doc["goal"]))


def dumps_problem(problem: ProblemInstance) -> str:
    """Canonical single-line JSON; byte-stable for corpus diffing."""
    return json.dumps(problem_to_json(problem), sort_keys=True, separators=(",", ":"))


def save_problem(problem: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(dumps_problem(problem) + "\n", encoding="utf-8")


def load_problem(path: str | Path) -> ProblemInstance:
    return problem_from_json(json.loads(Path(path).read_text(encoding="utf-8")))
