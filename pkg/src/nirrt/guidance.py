"""Point-cloud guidance pipeline.

Builds an evenly distributed cloud of free states (optionally restricted
to the informed focus set), attaches start/goal proximity channels,
normalizes into the network frame, queries a guidance provider for
per-point probabilities, and iteratively advances the endpoint pair until
the guidance set connects start to goal at the step-size radius.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Optional, Protocol

import numpy as np
import requests
from scipy.spatial import cKDTree

from .config import PlannerConfig
from .errors import ContractViolationError, DegenerateDomainError, GuidanceUnavailableError
from .geometry import State, as_state
from .informed import InformedSet
from .rng import RngHandle
from .world import ProblemInstance, World, sample_uniform_box_batch

GUIDE_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Free states with optional feature channels and normalization metadata.

    points stay in world coordinates; `normalized` is the 3-column network
    frame (z = 0 for 2D problems). start/goal record the anchors the
    feature channels were computed against, so local providers can solve
    the same subproblem the features describe.
    """

    points: np.ndarray
    features: np.ndarray | None = None
    normalized: np.ndarray | None = None
    offset: np.ndarray | None = None
    scale: float | None = None
    start: State | None = None
    goal: State | None = None

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class GuidanceSet:
    """Cloud points classified as guidance states (probability > 0.5)."""

    indices: np.ndarray       # positions within the source cloud
    points: np.ndarray        # world-frame member coordinates
    probabilities: np.ndarray # per-member probability

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def empty(cls, dimension: int) -> "GuidanceSet":
        return cls(np.zeros(0, dtype=int), np.zeros((0, dimension)), np.zeros(0))


class GuidanceProvider(Protocol):
    def infer(self, cloud: PointCloud) -> np.ndarray:
        """Per-point guidance probabilities in [0, 1], length len(cloud)."""
        ...


def farthest_point_downsample(candidates: np.ndarray, n: int) -> np.ndarray:
    """Greedy max-min selection of n rows; maximizes the minimum pairwise gap."""
    m = candidates.shape[0]
    if m < n:
        raise ContractViolationError(f"cannot select {n} points from {m} candidates")
    if m == n:
        return candidates.copy()
    chosen = np.empty(n, dtype=int)
    chosen[0] = 0
    dist = np.linalg.norm(candidates - candidates[0], axis=1)
    for k in range(1, n):
        idx = int(np.argmax(dist))
        chosen[k] = idx
        dist = np.minimum(dist, np.linalg.norm(candidates - candidates[idx], axis=1))
    return candidates[chosen]


def point_cloud_sampling(world: World, n: int, rng: RngHandle,
                         focus: InformedSet | None = None,
                         oversample_factor: int = 4) -> PointCloud:
    """Cloud of exactly n free states, evenly spread by farthest-point selection.

    Oversamples `oversample_factor * n` candidates uniformly from the free
    space (intersected with the focus ellipsoid when given) and then
    downsamples. A domain too small to yield n candidates is an error.
    """
    target = oversample_factor * n
    budget = 250 * target
    collected: list[np.ndarray] = []
    count = 0
    drawn = 0
    while count < target and drawn < budget:
        chunk = min(max(target, 1024), budget - drawn)
        if focus is not None:
            pts = focus.sample_batch(chunk, rng)
        else:
            pts = sample_uniform_box_batch(world.lo, world.hi, chunk, rng)
        drawn += chunk
        keep = world.is_free_many(pts)
        if focus is not None and keep.any():
            keep &= focus.contains_many(pts)
        pts = pts[keep]
        if pts.shape[0]:
            take = min(pts.shape[0], target - count)
            collected.append(pts[:take])
            count += take
    if count < n:
        raise DegenerateDomainError(
            f"only {count} candidate states found for a cloud of {n} (domain too small)")
    candidates = np.vstack(collected)
    return PointCloud(points=farthest_point_downsample(candidates, n))


def add_one_hot_features(cloud: PointCloud, start: State, goal: State, eta: float) -> PointCloud:
    """Two binary channels: within eta of the start / of the goal.

    Both channels may be set at once when the anchors are close together.
    """
    start = as_state(start, cloud.dimension)
    goal = as_state(goal, cloud.dimension)
    near_start = np.linalg.norm(cloud.points - start, axis=1) <= eta
    near_goal = np.linalg.norm(cloud.points - goal, axis=1) <= eta
    features = np.stack([near_start, near_goal], axis=1).astype(np.float64)
    return replace(cloud, features=features, start=start, goal=goal)


def normalize_coordinates(cloud: PointCloud) -> PointCloud:
    """Center on the centroid and scale by the maximum absolute extent.

    Output coordinates lie in [-1, 1]; 2D clouds get a zero z column so
    the network frame is always three-dimensional.
    """
    if not len(cloud):
        raise ContractViolationError("cannot normalize an empty cloud")
    offset = cloud.points.mean(axis=0)
    centered = cloud.points - offset
    scale = float(np.max(np.abs(centered)))
    if scale == 0.0:
        scale = 1.0
    normalized = centered / scale
    if cloud.dimension == 2:
        normalized = np.hstack([normalized, np.zeros((len(cloud), 1))])
    return replace(cloud, normalized=normalized, offset=offset, scale=scale)


def denormalize(cloud: PointCloud, normalized: np.ndarray) -> np.ndarray:
    """Map network-frame coordinates back into world coordinates."""
    if cloud.offset is None or cloud.scale is None:
        raise ContractViolationError("cloud carries no normalization metadata")
    return normalized[:, : cloud.dimension] * cloud.scale + cloud.offset


def _provider_probabilities(cloud: PointCloud, provider: GuidanceProvider) -> np.ndarray:
    try:
        probs = np.asarray(provider.infer(cloud), dtype=np.float64)
    except GuidanceUnavailableError:
        raise
    except Exception as exc:
        raise GuidanceUnavailableError(f"guidance provider failed: {exc}") from exc
    if probs.shape != (len(cloud),):
        raise GuidanceUnavailableError(
            f"provider returned {probs.shape} probabilities for {len(cloud)} points")
    if not np.all((probs >= 0.0) & (probs <= 1.0)):
        raise GuidanceUnavailableError("provider returned probabilities outside [0, 1]")
    return probs


def guidance_from_probabilities(cloud: PointCloud, probs: np.ndarray) -> GuidanceSet:
    mask = probs > GUIDE_THRESHOLD
    idx = np.flatnonzero(mask)
    return GuidanceSet(indices=idx, points=cloud.points[idx].copy(), probabilities=probs[idx].copy())


def infer_guidance(cloud: PointCloud, provider: GuidanceProvider) -> GuidanceSet:
    """Query the provider and keep the points with probability > 0.5."""
    if cloud.normalized is None or cloud.features is None:
        raise ContractViolationError("cloud must be featured and normalized before inference")
    return guidance_from_probabilities(cloud, _provider_probabilities(cloud, provider))


def bfs_connectivity(guide, start: State, goal: State, eta: float):
    """Breadth-first traversal over {start} + guidance points + {goal}.

    Edges join states at distance <= eta; no collision checking. Returns
    (goal reached, visited states as an array whose first row is start).
    """
    pts = guide.points if isinstance(guide, GuidanceSet) else np.atleast_2d(np.asarray(guide))
    start = as_state(start)
    goal = as_state(goal)
    nodes = np.vstack([start[None, :], goal[None, :], pts.reshape(-1, start.shape[0])])
    tree = cKDTree(nodes)
    pairs = tree.query_pairs(eta, output_type="ndarray")
    adjacency: list[list[int]] = [[] for _ in range(nodes.shape[0])]
    for i, j in pairs:
        adjacency[i].append(int(j))
        adjacency[j].append(int(i))
    visited = np.zeros(nodes.shape[0], dtype=bool)
    visited[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if not visited[v]:
                visited[v] = True
                queue.append(v)
    return bool(visited[1]), nodes[visited]


def boundary_score(b: State, anchor_from: State, anchor_to: State) -> float:
    """Progress of a boundary state away from the near anchor, in [0, 1]."""
    d_from = float(np.linalg.norm(b - anchor_from))
    d_to = float(np.linalg.norm(b - anchor_to))
    if d_from + d_to == 0.0:
        return 0.5
    return d_from / (d_from + d_to)


def boundary_next_endpoint(visited: np.ndarray, cloud: PointCloud, guide: GuidanceSet,
                           anchor_from: State, anchor_to: State, eta: float) -> Optional[State]:
    """Best frontier state of the visited set, or None when there is none.

    Boundary states are visited states with at least one non-guidance cloud
    point within eta/2. The winner maximizes the boundary score; ties go to
    the state closer to the far anchor.
    """
    visited = np.atleast_2d(np.asarray(visited, dtype=np.float64))
    if not visited.shape[0]:
        raise ContractViolationError("visited set must be nonempty")
    non_guide_mask = np.ones(len(cloud), dtype=bool)
    non_guide_mask[guide.indices] = False
    non_guide = cloud.points[non_guide_mask]
    if not non_guide.shape[0]:
        return None
    dist, _ = cKDTree(non_guide).query(visited)
    boundary = visited[dist <= eta / 2.0]
    if not boundary.shape[0]:
        return None
    anchor_from = as_state(anchor_from)
    anchor_to = as_state(anchor_to)
    scores = np.array([boundary_score(b, anchor_from, anchor_to) for b in boundary])
    d_to = np.linalg.norm(boundary - anchor_to, axis=1)
    best = max(range(boundary.shape[0]), key=lambda i: (scores[i], -d_to[i]))
    return boundary[best]


@dataclass(frozen=True)
class GuideRound:
    direction: str                 # "forward" or "backward"
    endpoint: State | None         # next subproblem endpoint chosen this round
    score: float | None
    connected: bool
    guide_size: int = 0            # accumulated guidance states so far


@dataclass(frozen=True, eq=False)
class GuidanceResult:
    guide: GuidanceSet
    connected: bool
    rounds: tuple[GuideRound, ...]
    cloud: PointCloud


def pointnet_guide(problem: ProblemInstance, c_curr: float, provider: GuidanceProvider,
                   cfg: PlannerConfig, rng: RngHandle,
                   use_focus: bool = True, use_connect: bool = True) -> GuidanceResult:
    """Full guidance inference: focus-constrained cloud plus connect rounds.

    The cloud is sampled once (from the focus set when a finite cost is
    known and focusing is enabled). Each round re-features the cloud with
    the current endpoint pair, accumulates provider output by union, and
    stops as soon as BFS connects start to goal; otherwise the endpoints
    advance to the best boundary states for up to `guide_rounds` rounds.
    """
    start, goal = problem.start, problem.goal
    focus = None
    if use_focus and np.isfinite(c_curr):
        focus = InformedSet(start, goal, c_curr)
    base = point_cloud_sampling(problem.world, cfg.cloud_size, rng,
                                focus=focus, oversample_factor=cfg.oversample_factor)
    probs_max = np.zeros(len(base))
    start_j: State = start
    goal_j: State = goal
    rounds: list[GuideRound] = []
    cloud = base
    n_rounds = cfg.guide_rounds if use_connect else 1
    for _ in range(n_rounds):
        cloud = normalize_coordinates(add_one_hot_features(base, start_j, goal_j, cfg.step_size))
        probs_max = np.maximum(probs_max, _provider_probabilities(cloud, provider))
        guide = guidance_from_probabilities(cloud, probs_max)
        if not use_connect:
            return GuidanceResult(guide, False, tuple(rounds), cloud)
        connected, visited = bfs_connectivity(guide, start, goal, cfg.step_size)
        if connected:
            rounds.append(GuideRound("forward", None, None, True, len(guide)))
            return GuidanceResult(guide, True, tuple(rounds), cloud)
        nxt = boundary_next_endpoint(visited, cloud, guide, start, goal, cfg.step_size)
        if nxt is not None:
            start_j = nxt
        rounds.append(GuideRound("forward", nxt, None if nxt is None else
                                 boundary_score(nxt, start, goal), False, len(guide)))
        connected, visited_back = bfs_connectivity(guide, goal, start, cfg.step_size)
        if connected:
            rounds.append(GuideRound("backward", None, None, True, len(guide)))
            return GuidanceResult(guide, True, tuple(rounds), cloud)
        nxt_goal = boundary_next_endpoint(visited_back, cloud, guide, goal, start, cfg.step_size)
        if nxt_goal is not None:
            goal_j = nxt_goal
        rounds.append(GuideRound("backward", nxt_goal, None if nxt_goal is None else
                                 boundary_score(nxt_goal, goal, start), False, len(guide)))
    return GuidanceResult(guidance_from_probabilities(cloud, probs_max), False, tuple(rounds), cloud)


class RemoteGuidanceProvider:
    """HTTP client for the guidance wire protocol (POST /infer)."""

    def __init__(self, url: str, timeout: float = 10.0):
        self.url = url.rstrip("/")
        self.timeout = timeout

    def infer(self, cloud: PointCloud) -> np.ndarray:
        if cloud.normalized is None or cloud.features is None:
            raise ContractViolationError("cloud must be featured and normalized before inference")
        payload = {
            "points": cloud.normalized.tolist(),
            "features": cloud.features.astype(int).tolist(),
        }
        try:
            response = requests.post(f"{self.url}/infer", json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise GuidanceUnavailableError(f"guidance request failed: {exc}") from exc
        if response.status_code != 200:
            raise GuidanceUnavailableError(f"guidance server returned HTTP {response.status_code}")
        try:
            probs = response.json()["probabilities"]
        except Exception as exc:
            raise GuidanceUnavailableError(f"malformed guidance response: {exc}") from exc
        return np.asarray(probs, dtype=np.float64)
