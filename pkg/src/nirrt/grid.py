"""Grid A* with clearance dilation.

Serves four roles: feasibility checking for generated problems, training
label generation, the oracle guidance provider, and a near-optimal cost
reference. Cells are unit pixels/voxels by default; occupancy is dilated
by the clearance radius (Chebyshev disk/ball) before search.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import ContractViolationError
from .geometry import State, as_state
from .guidance import PointCloud
from .world import ProblemInstance, World


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    resolution: float            # cells per world unit
    origin: np.ndarray           # world coordinates of the grid corner
    occupied: np.ndarray         # boolean, after clearance dilation
    clearance_cells: int

    @property
    def dims(self) -> tuple[int, ...]:
        return self.occupied.shape

    @property
    def dimension(self) -> int:
        return self.occupied.ndim

    def cell_of(self, x: State) -> tuple[int, ...]:
        idx = np.floor((np.asarray(x, dtype=np.float64) - self.origin) * self.resolution).astype(int)
        idx = np.clip(idx, 0, np.array(self.dims) - 1)
        return tuple(int(i) for i in idx)

    def centers_of(self, cells: np.ndarray) -> np.ndarray:
        cells = np.atleast_2d(np.asarray(cells, dtype=np.float64))
        return self.origin + (cells + 0.5) / self.resolution


def rasterize(world: World, resolution: float = 1.0) -> OccupancyGrid:
    """Occupancy = cell center inside an obstacle, then Chebyshev-dilated.

    The dilation radius is round(clearance * resolution) cells, matching
    pixel-space label generation rather than the continuous checker.
    """
    dims = np.round((world.hi - world.lo) * resolution).astype(int)
    if np.any(dims <= 0):
        raise ContractViolationError(f"degenerate grid dims {dims}")
    axes = [world.lo[i] + (np.arange(dims[i]) + 0.5) / resolution for i in range(world.dimension)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, world.dimension)
    if world.obstacles:
        occupied = (world.obstacle_clearance_many(centers) <= 0.0).reshape(tuple(dims))
    else:
        occupied = np.zeros(tuple(dims), dtype=bool)
    radius = int(round(world.clearance * resolution))
    if radius > 0 and occupied.any():
        occupied = ndimage.maximum_filter(occupied, size=2 * radius + 1, mode="constant", cval=False)
    return OccupancyGrid(float(resolution), world.lo.copy(), occupied, radius)


def _neighbor_offsets(d: int) -> list[tuple[tuple[int, ...], float]]:
    offsets = []
    for off in itertools.product((-1, 0, 1), repeat=d):
        if any(off):
            offsets.append((off, float(np.linalg.norm(off))))
    return offsets


def astar(grid: OccupancyGrid, start: State, goal: State):
    """Minimal-cost 8-/26-connected path under Euclidean step costs.

    Returns (cells, cost) with cost in world units, or None when start and
    goal are disconnected. Ties in f are broken by lower heuristic, then
    row-major cell order, so paths are deterministic.
    """
    start_cell = grid.cell_of(as_state(start, grid.dimension))
    goal_cell = grid.cell_of(as_state(goal, grid.dimension))
    if grid.occupied[start_cell]:
        raise ContractViolationError(f"start cell {start_cell} is occupied")
    if grid.occupied[goal_cell]:
        raise ContractViolationError(f"goal cell {goal_cell} is occupied")
    if start_cell == goal_cell:
        return [start_cell], 0.0

    dims = grid.dims
    scale = 1.0 / grid.resolution
    free = ~grid.occupied.reshape(-1)
    strides = np.array([int(np.prod(dims[i + 1:], dtype=np.int64)) for i in range(len(dims))])
    offsets = _neighbor_offsets(grid.dimension)
    flat_offsets = [(int(np.dot(off, strides)), off, cost * scale) for off, cost in offsets]

    start_flat = int(np.ravel_multi_index(start_cell, dims))
    goal_flat = int(np.ravel_multi_index(goal_cell, dims))
    goal_arr = np.asarray(goal_cell, dtype=np.float64)

    g = np.full(free.shape[0], np.inf)
    parent = np.full(free.shape[0], -1, dtype=np.int64)
    closed = np.zeros(free.shape[0], dtype=bool)

    def h(cell) -> float:
        return float(np.linalg.norm(np.asarray(cell, dtype=np.float64) - goal_arr)) * scale

    g[start_flat] = 0.0
    heap = [(h(start_cell), h(start_cell), start_flat, start_cell)]
    dims_t = tuple(dims)
    while heap:
        f, _, flat, cell = heapq.heappop(heap)
        if closed[flat]:
            continue
        if flat == goal_flat:
            cells = []
            cur = flat
            while cur != -1:
                cells.append(tuple(int(c) for c in np.unravel_index(cur, dims_t)))
                cur = int(parent[cur])
            cells.reverse()
            return cells, float(g[flat])
        closed[flat] = True
        gc = g[flat]
        for d_flat, off, step in flat_offsets:
            ncell = tuple(cell[i] + off[i] for i in range(len(off)))
            if any(c < 0 or c >= dims_t[i] for i, c in enumerate(ncell)):
                continue
            nflat = flat + d_flat
            if not free[nflat] or closed[nflat]:
                continue
            ng = gc + step
            if ng < g[nflat]:
                g[nflat] = ng
                parent[nflat] = flat
                hh = h(ncell)
                heapq.heappush(heap, (ng + hh, hh, nflat, ncell))
    return None


def grid_path_exists(grid: OccupancyGrid, start: State, goal: State) -> bool:
    """Whether A* would find a path: same-component test on the dilated grid.

    Connected-component labeling with full (8/26) connectivity is exactly
    the reachability relation of the A* neighborhood, at a fraction of the
    cost of running the search.
    """
    start_cell = grid.cell_of(as_state(start, grid.dimension))
    goal_cell = grid.cell_of(as_state(goal, grid.dimension))
    if grid.occupied[start_cell] or grid.occupied[goal_cell]:
        return False
    structure = np.ones((3,) * grid.dimension, dtype=bool)
    labels, _ = ndimage.label(~grid.occupied, structure=structure)
    return bool(labels[start_cell] == labels[goal_cell])


def nearest_free_cell(grid: OccupancyGrid, x: State, max_radius: int | None = None):
    """Free cell closest to x, searched over growing Chebyshev rings.

    Continuous clearance is Euclidean while grid dilation is Chebyshev, so
    a free state can land on an occupied cell; a small snap radius absorbs
    the mismatch. Returns None when nothing free is within reach.
    """
    cell = grid.cell_of(x)
    if not grid.occupied[cell]:
        return cell
    if max_radius is None:
        max_radius = grid.clearance_cells + 2
    dims = grid.dims
    pos = (np.asarray(x, dtype=np.float64) - grid.origin) * grid.resolution - 0.5
    best = None
    best_key = None
    for r in range(1, max_radius + 1):
        for off in itertools.product(range(-r, r + 1), repeat=grid.dimension):
            if max(abs(o) for o in off) != r:
                continue
            cand = tuple(cell[i] + off[i] for i in range(grid.dimension))
            if any(c < 0 or c >= dims[i] for i, c in enumerate(cand)):
                continue
            if grid.occupied[cand]:
                continue
            key = (float(np.linalg.norm(np.asarray(cand, dtype=np.float64) - pos)), cand)
            if best_key is None or key < best_key:
                best_key = key
                best = cand
        if best is not None:
            return best
    return None


def label_guidance(grid: OccupancyGrid, path_cells, points: np.ndarray, eta: float) -> np.ndarray:
    """True for points within eta of some path cell center."""
    if not len(path_cells):
        raise ContractViolationError("cannot label against an empty path")
    centers = grid.centers_of(np.asarray(path_cells))
    tree = cKDTree(centers)
    dist, _ = tree.query(np.atleast_2d(points))
    return dist <= eta


class OracleGuidanceProvider:
    """Guidance probabilities from the grid A* optimal path.

    Points within eta of the current A* path get probability 1.0, the rest
    0.0. The endpoints come from the cloud's feature anchors so iterated
    subproblems (advanced start/goal) re-run A* between the new endpoints.
    """

    def __init__(self, problem: ProblemInstance, eta: float, resolution: float = 1.0):
        self.problem = problem
        self.eta = float(eta)
        self.grid = rasterize(problem.world, resolution)

    def infer(self, cloud: PointCloud) -> np.ndarray:
        start = cloud.start if cloud.start is not None else self.problem.start
        goal = cloud.goal if cloud.goal is not None else self.problem.goal
        zeros = np.zeros(len(cloud.points))
        start_cell = nearest_free_cell(self.grid, start)
        goal_cell = nearest_free_cell(self.grid, goal)
        if start_cell is None or goal_cell is None:
            return zeros
        result = astar(self.grid, self.grid.centers_of(np.array(start_cell))[0],
                       self.grid.centers_of(np.array(goal_cell))[0])
        if result is None:
            return zeros
        cells, _ = result
        return label_guidance(self.grid, cells, cloud.points, self.eta).astype(np.float64)
