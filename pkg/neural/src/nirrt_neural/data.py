"""Training-data loading for the guidance model.

Consumes the planner's JSON-lines records ({"world", "points", "labels",
"path"}) and turns each into the network input: normalized 3-column
coordinates (z = 0 for 2D), two proximity channels against the world's
start and goal, and per-point binary labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

EXPECTED_POINTS = 2048
# Proximity radius for the start/goal channels, matching the planner's
# per-dimension step size.
STEP_RADIUS = {2: 10.0, 3: 5.0}


@dataclass
class TrainingSample:
    points: np.ndarray    # (N, 3) normalized, z = 0 for 2D worlds
    features: np.ndarray  # (N, 2) start/goal proximity flags
    labels: np.ndarray    # (N,) binary guidance labels


def normalize_points(points: np.ndarray) -> np.ndarray:
    """Centroid-center and scale by max absolute extent; pad z for 2D."""
    centered = points - points.mean(axis=0)
    scale = float(np.max(np.abs(centered)))
    if scale == 0.0:
        scale = 1.0
    normalized = centered / scale
    if normalized.shape[1] == 2:
        normalized = np.hstack([normalized, np.zeros((len(normalized), 1))])
    return normalized


def proximity_features(points: np.ndarray, start: np.ndarray, goal: np.ndarray,
                       radius: float) -> np.ndarray:
    near_start = np.linalg.norm(points - start, axis=1) <= radius
    near_goal = np.linalg.norm(points - goal, axis=1) <= radius
    return np.stack([near_start, near_goal], axis=1).astype(np.float32)


def sample_from_record(doc: dict) -> TrainingSample:
    """Build one sample; raises ValueError on malformed records."""
    world = doc["world"]
    points = np.asarray(doc["points"], dtype=np.float64)
    labels = np.asarray(doc["labels"], dtype=np.float32)
    if points.ndim != 2 or points.shape[0] != EXPECTED_POINTS:
        raise ValueError(f"expected {EXPECTED_POINTS} points, got {points.shape}")
    if labels.shape != (EXPECTED_POINTS,):
        raise ValueError(f"labels shape {labels.shape} does not match points")
    dim = int(world["dimension"])
    if points.shape[1] != dim:
        raise ValueError(f"points are {points.shape[1]}-d but world is {dim}-d")
    start = np.asarray(world["start"], dtype=np.float64)
    goal = np.asarray(world["goal"], dtype=np.float64)
    features = proximity_features(points, start, goal, STEP_RADIUS[dim])
    return TrainingSample(
        points=normalize_points(points).astype(np.float32),
        features=features,
        labels=labels,
    )


def load_dataset(path: str | Path) -> tuple[list[TrainingSample], int]:
    """All well-formed samples from a JSON-lines file, plus the skip count."""
    samples = []
    skipped = 0
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                samples.append(sample_from_record(json.loads(line)))
            except (ValueError, KeyError, TypeError, json.JSONDecodeError):
                skipped += 1
    return samples, skipped


class GuidanceDataset(Dataset):
    def __init__(self, samples: list[TrainingSample]):
        self.samples = samples

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, idx: int):
        s = self.samples[idx]
        return (torch.from_numpy(s.points), torch.from_numpy(s.features),
                torch.from_numpy(s.labels))
