"""Planner configuration with per-dimension defaults."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolationError
from .world import DEFAULT_COLLISION_RESOLUTION, World

_UNIT_BALL_MEASURE = {2: np.pi, 3: 4.0 * np.pi / 3.0}
_DEFAULT_STEP = {2: 10.0, 3: 5.0}
_DEFAULT_ITERATIONS = {2: 3000, 3: 5000}


def rewiring_gamma(world: World) -> float:
    """Connection-radius constant from the bounds measure.

    The total bounds volume upper-bounds the free-space measure, which
    keeps the shrinking radius admissible for asymptotic optimality.
    """
    d = world.dimension
    measure = float(np.prod(world.hi - world.lo))
    return 2.0 * (1.0 + 1.0 / d) ** (1.0 / d) * (measure / _UNIT_BALL_MEASURE[d]) ** (1.0 / d)


@dataclass(frozen=True)
class PlannerConfig:
    """Tuning shared by every planner variant.

    step_size doubles as the guidance label radius and the connectivity
    radius of the guidance-set BFS, mirroring how the planners reuse it.
    """

    step_size: float = 10.0
    goal_radius: float = 10.0
    rewire_gamma: float = 1.0
    max_iterations: int = 3000
    collision_resolution: float = 0.5
    alpha: float = 0.9              # guidance retrigger threshold on cost improvement
    cloud_size: int = 2048
    guide_rounds: int = 5
    oversample_factor: int = 4
    provider_timeout: float = 10.0

    def __post_init__(self):
        if self.step_size <= 0:
            raise ContractViolationError(f"step_size must be positive, got {self.step_size}")
        if self.goal_radius <= 0:
            raise ContractViolationError(f"goal_radius must be positive, got {self.goal_radius}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ContractViolationError(f"alpha must be in [0, 1], got {self.alpha}")

    @classmethod
    def for_world(cls, world: World, **overrides) -> "PlannerConfig":
        d = world.dimension
        defaults = dict(
            step_size=_DEFAULT_STEP[d],
            goal_radius=_DEFAULT_STEP[d],
            rewire_gamma=rewiring_gamma(world),
            max_iterations=_DEFAULT_ITERATIONS[d],
            collision_resolution=DEFAULT_COLLISION_RESOLUTION[d],
        )
        defaults.update(overrides)
        return cls(**defaults)

    def with_(self, **overrides) -> "PlannerConfig":
        return replace(self, **overrides)
