"""RRT* search tree: nearest/near queries, steering, extension and rewiring.

The tree keeps vertices, parent links and accumulated path costs in flat
numpy arrays so the per-iteration nearest/near scans stay vectorized.
Cost consistency (cost(v) == cost(parent) + edge length) is maintained
through every rewiring by propagating deltas to descendants.
"""

from __future__ import annotations

import numpy as np

from .config import PlannerConfig
from .errors import ContractViolationError
from .geometry import State, as_state
from .world import World, collision_free_segment

_INITIAL_CAPACITY = 256


class Tree:
    def __init__(self, root: State):
        root = as_state(root)
        d = root.shape[0]
        self._pts = np.zeros((_INITIAL_CAPACITY, d))
        self._cost = np.zeros(_INITIAL_CAPACITY)
        self._parent = np.full(_INITIAL_CAPACITY, -1, dtype=np.int64)
        self._children: list[list[int]] = [[]]
        self._pts[0] = root
        self.size = 1

    @property
    def dimension(self) -> int:
        return self._pts.shape[1]

    @property
    def points(self) -> np.ndarray:
        return self._pts[: self.size]

    @property
    def costs(self) -> np.ndarray:
        return self._cost[: self.size]

    @property
    def parents(self) -> np.ndarray:
        return self._parent[: self.size]

    def state(self, i: int) -> State:
        return self._pts[i].copy()

    def cost(self, i: int) -> float:
        return float(self._cost[i])

    def parent(self, i: int) -> int:
        return int(self._parent[i])

    def _grow(self) -> None:
        cap = self._pts.shape[0]
        self._pts = np.vstack([self._pts, np.zeros_like(self._pts)])
        self._cost = np.concatenate([self._cost, np.zeros(cap)])
        self._parent = np.concatenate([self._parent, np.full(cap, -1, dtype=np.int64)])

    def add(self, x: State, parent: int, cost: float) -> int:
        if self.size == self._pts.shape[0]:
            self._grow()
        idx = self.size
        self._pts[idx] = x
        self._cost[idx] = cost
        self._parent[idx] = parent
        self._children.append([])
        self._children[parent].append(idx)
        self.size += 1
        return idx

    def reparent(self, i: int, new_parent: int, new_cost: float) -> None:
        """Re-attach vertex i under new_parent and push the cost change down."""
        old_parent = int(self._parent[i])
        self._children[old_parent].remove(i)
        self._parent[i] = new_parent
        self._children[new_parent].append(i)
        delta = new_cost - self._cost[i]
        stack = [i]
        while stack:
            v = stack.pop()
            self._cost[v] += delta
            stack.extend(self._children[v])

    def path_to(self, i: int) -> list[State]:
        path = []
        while i != -1:
            path.append(self._pts[i].copy())
            i = int(self._parent[i])
        path.reverse()
        return path


def nearest(tree: Tree, x: State) -> int:
    """Index of the vertex closest to x; ties break to the lowest index."""
    if tree.size == 0:
        raise ContractViolationError("nearest() on an empty tree")
    d2 = np.einsum("ij,ij->i", tree.points - x, tree.points - x)
    return int(np.argmin(d2))


def steer(from_: State, to: State, eta: float) -> State:
    """Move from `from_` toward `to` by at most eta."""
    if eta <= 0:
        raise ContractViolationError(f"steer step must be positive, got {eta}")
    from_ = np.asarray(from_, dtype=np.float64)
    to = np.asarray(to, dtype=np.float64)
    delta = to - from_
    dist = float(np.linalg.norm(delta))
    if dist <= eta:
        return to.copy()
    return from_ + delta * (eta / dist)


def near(tree: Tree, x: State, radius: float) -> np.ndarray:
    """Indices of all vertices within `radius` of x (closed ball)."""
    if radius < 0:
        raise ContractViolationError(f"radius must be non-negative, got {radius}")
    diff = tree.points - x
    d2 = np.einsum("ij,ij->i", diff, diff)
    return np.flatnonzero(d2 <= radius * radius)


def rewire_radius(cfg: PlannerConfig, n: int, d: int) -> float:
    if n <= 1:
        return 0.0
    return min(cfg.rewire_gamma * (np.log(n) / n) ** (1.0 / d), cfg.step_size)


def extend_and_rewire(tree: Tree, x_rand: State, world: World, cfg: PlannerConfig):
    """One RRT* extension toward x_rand.

    Steers from the nearest vertex, inserts the new state if the connecting
    segment is collision-free, picks the minimum-cost parent among the near
    set, and rewires neighbors whose cost improves through the new vertex.
    Returns the inserted index, or None when the extension is blocked.
    """
    i_nearest = nearest(tree, x_rand)
    x_near_state = tree.state(i_nearest)
    x_new = steer(x_near_state, x_rand, cfg.step_size)
    if not collision_free_segment(world, x_near_state, x_new, cfg.collision_resolution):
        return None

    radius = rewire_radius(cfg, tree.size, tree.dimension)
    near_idx = near(tree, x_new, radius)
    near_pts = tree.points[near_idx]
    near_dists = np.linalg.norm(near_pts - x_new, axis=1)

    parent = i_nearest
    best_cost = tree.cost(i_nearest) + float(np.linalg.norm(x_near_state - x_new))
    if near_idx.size:
        cand_costs = tree.costs[near_idx] + near_dists
        for k in np.argsort(cand_costs, kind="stable"):
            idx = int(near_idx[k])
            if cand_costs[k] >= best_cost:
                break
            if idx == i_nearest:
                continue
            if collision_free_segment(world, near_pts[k], x_new, cfg.collision_resolution):
                parent = idx
                best_cost = float(cand_costs[k])
                break

    i_new = tree.add(x_new, parent, best_cost)

    for k, idx in enumerate(near_idx):
        idx = int(idx)
        if idx == parent:
            continue
        through = best_cost + float(near_dists[k])
        if through < tree.cost(idx) and collision_free_segment(
                world, x_new, near_pts[k], cfg.collision_resolution):
            tree.reparent(idx, i_new, through)
    return i_new


def in_goal_region(x: State, goal: State, cfg: PlannerConfig) -> bool:
    """Closed ball of radius goal_radius around the goal."""
    return float(np.linalg.norm(np.asarray(x) - np.asarray(goal))) <= cfg.goal_radius


def solution_cost(tree: Tree, soln: set[int] | list[int], goal: State) -> float:
    """Best path cost through any solution vertex, +inf when none exist."""
    if not soln:
        return float("inf")
    idx = np.fromiter(soln, dtype=np.int64)
    totals = tree.costs[idx] + np.linalg.norm(tree.points[idx] - np.asarray(goal), axis=1)
    return float(totals.min())
