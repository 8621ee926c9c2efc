"""Ellipsoidal focus set for informed sampling.

Once a solution of cost c_best exists, only states whose focal sum
(distance to start plus distance to goal) is at most c_best can improve
it. Sampling restricted to this prolate hyperspheroid accelerates
convergence without losing completeness.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolationError, InfeasibleFocusError
from .geometry import State, as_state, check_same_dim, sample_unit_ball_batch
from .rng import RngHandle
from .world import World, sample_free

_DEGENERATE_TOL = 1e-9


def _rotation_to_world(direction: np.ndarray) -> np.ndarray:
    """Rotation matrix whose first column is the given unit direction, det +1."""
    d = direction.shape[0]
    if d == 2:
        c, s = direction
        return np.array([[c, -s], [s, c]])
    # 3D: complete an orthonormal right-handed basis around the axis.
    helper = np.zeros(3)
    helper[np.argmin(np.abs(direction))] = 1.0
    v2 = helper - np.dot(helper, direction) * direction
    v2 /= np.linalg.norm(v2)
    v3 = np.cross(direction, v2)
    return np.column_stack([direction, v2, v3])


class InformedSet:
    """Immutable snapshot of the focus ellipsoid for a given best cost."""

    def __init__(self, start: State, goal: State, c_best: float):
        self.start = as_state(start)
        self.goal = as_state(goal)
        d = check_same_dim(self.start, self.goal)
        self.c_min = float(np.linalg.norm(self.goal - self.start))
        c_best = float(c_best)
        if not np.isfinite(c_best) or c_best < self.c_min - _DEGENERATE_TOL:
            raise ContractViolationError(
                f"best cost {c_best} below the start-goal distance {self.c_min}: empty set")
        self.c_best = max(c_best, self.c_min)
        self.center = (self.start + self.goal) / 2.0
        if self.c_min > 0:
            direction = (self.goal - self.start) / self.c_min
        else:
            direction = np.zeros(d)
            direction[0] = 1.0
        self.rotation = _rotation_to_world(direction)
        # Transverse radius c_best/2; conjugate radii collapse to zero when
        # the set degenerates to the start-goal segment.
        conj_sq = self.c_best**2 - self.c_min**2
        conj = np.sqrt(conj_sq) / 2.0 if conj_sq > _DEGENERATE_TOL else 0.0
        self.radii = np.full(d, conj)
        self.radii[0] = self.c_best / 2.0

    @property
    def dimension(self) -> int:
        return self.start.shape[0]

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        focal = np.linalg.norm(pts - self.start, axis=1) + np.linalg.norm(pts - self.goal, axis=1)
        return focal <= self.c_best

    def sample_batch(self, n: int, rng: RngHandle) -> np.ndarray:
        ball = sample_unit_ball_batch(self.dimension, n, rng)
        return (ball * self.radii) @ self.rotation.T + self.center


def informed_membership(focus: InformedSet, x: State) -> bool:
    """Evaluate the focal-sum inequality exactly."""
    x = as_state(x, focus.dimension)
    return bool(focus.contains_many(x[None, :])[0])


def informed_sample(focus: InformedSet, rng: RngHandle) -> State:
    """Uniform sample over the prolate hyperspheroid."""
    return focus.sample_batch(1, rng)[0]


def informed_or_uniform(focus: InformedSet | None, world: World, rng: RngHandle,
                        budget: int = 100_000) -> State:
    """Informed sampling intersected with free space, or plain free sampling.

    With no focus set (no solution yet) this is uniform over free space.
    With a focus set, rejection keeps only free informed samples; running
    out of budget means c_best is inconsistent with the world.
    """
    if focus is None:
        return sample_free(world, rng)
    chunk = 64
    drawn = 0
    while drawn < budget:
        pts = focus.sample_batch(min(chunk, budget - drawn), rng)
        free = world.is_free_many(pts)
        hits = np.flatnonzero(free)
        if hits.size:
            return pts[hits[0]]
        drawn += chunk
    raise InfeasibleFocusError(
        f"no free state inside the focus set after {budget} attempts (c_best={focus.c_best})")
