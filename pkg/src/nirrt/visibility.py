"""Exact shortest paths in 2D worlds of axis-aligned boxes.

Visibility-graph search over box corners. Paths may touch obstacle
boundaries (zero-clearance convention: a segment is blocked only when it
crosses the open interior of a box), which makes the result the true
continuous optimum for corner-hugging routes. Used as the near-optimal
cost reference for box-only benchmark families.
"""

from __future__ import annotations

import heapq

import numpy as np

from .errors import ContractViolationError
from .geometry import State, as_state
from .world import Ball, Box, World

_EPS = 1e-12


def _segment_crosses_box_interior(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> bool:
    """True iff the open segment (a, b) intersects the open box (lo, hi).

    Slab clipping with open intervals: boundary contact (running along a
    face or grazing a corner) does not count as a crossing.
    """
    d = b - a
    t0, t1 = 0.0, 1.0
    for i in range(2):
        if abs(d[i]) < _EPS:
            if a[i] <= lo[i] + _EPS or a[i] >= hi[i] - _EPS:
                return False
        else:
            ta = (lo[i] - a[i]) / d[i]
            tb = (hi[i] - a[i]) / d[i]
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 >= t1 - _EPS:
                return False
    return True


def _visible(a: np.ndarray, b: np.ndarray, boxes: list[Box]) -> bool:
    return not any(_segment_crosses_box_interior(a, b, box.lo, box.hi) for box in boxes)


def _strictly_inside_any(p: np.ndarray, boxes: list[Box]) -> bool:
    return any(bool(np.all(p > box.lo + _EPS) and np.all(p < box.hi - _EPS)) for box in boxes)


def shortest_path_cost(world: World, start: State, goal: State) -> float:
    """Exact shortest collision-free path cost, or +inf if disconnected.

    Only supports 2D zero-clearance worlds whose obstacles are boxes; other
    worlds have no closed-form visibility graph here.
    """
    if world.dimension != 2:
        raise ContractViolationError("visibility oracle supports 2D worlds only")
    if world.clearance != 0.0:
        raise ContractViolationError("visibility oracle supports zero-clearance worlds only")
    if any(isinstance(o, Ball) for o in world.obstacles):
        raise ContractViolationError("visibility oracle supports box obstacles only")
    start = as_state(start, 2)
    goal = as_state(goal, 2)
    boxes = [o for o in world.obstacles if isinstance(o, Box)]

    nodes = [start, goal]
    for box in boxes:
        for corner in (
            (box.lo[0], box.lo[1]),
            (box.lo[0], box.hi[1]),
            (box.hi[0], box.lo[1]),
            (box.hi[0], box.hi[1]),
        ):
            p = np.array(corner, dtype=np.float64)
            if np.all(p >= world.lo) and np.all(p <= world.hi) and not _strictly_inside_any(p, boxes):
                nodes.append(p)

    n = len(nodes)
    if _strictly_inside_any(start, boxes) or _strictly_inside_any(goal, boxes):
        return float("inf")

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if _visible(nodes[i], nodes[j], boxes):
                w = float(np.linalg.norm(nodes[i] - nodes[j]))
                adjacency[i].append((j, w))
                adjacency[j].append((i, w))

    dist = [float("inf")] * n
    dist[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == 1:
            return d
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist[1]
