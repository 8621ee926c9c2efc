import json
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest
import torch

from nirrt_neural.data import load_dataset
from nirrt_neural.train import TrainConfig, save_checkpoint, train

DATASET_SEED = 123
DATASET_COUNT = 500
SMOKE_EPOCHS = 10

_CACHE = Path(tempfile.gettempdir()) / f"nirrt-neural-train{DATASET_COUNT}-seed{DATASET_SEED}.jsonl"


def planner_cli(args: list[str]) -> subprocess.CompletedProcess:
    """Invoke the planner package strictly through its command-line interface."""
    exe = shutil.which("nirrt")
    cmd = [exe] + args if exe else [sys.executable, "-m", "nirrt.cli"] + args
    return subprocess.run(cmd, capture_output=True, text=True, check=True)


@pytest.fixture(scope="session")
def dataset_path() -> Path:
    """500 planner-emitted training records (cached across sessions).

    The records are a pure function of the seed, so the cache is safe; set
    NIRRT_TRAIN_DATA to reuse an existing file.
    """
    override = os.environ.get("NIRRT_TRAIN_DATA")
    if override:
        return Path(override)
    if not _CACHE.exists():
        tmp = _CACHE.with_suffix(".partial")
        planner_cli(["gen-training-data", "--count", str(DATASET_COUNT),
                     "--seed", str(DATASET_SEED), "--out", str(tmp)])
        tmp.replace(_CACHE)
    return _CACHE


@pytest.fixture(scope="session")
def dataset(dataset_path):
    samples, skipped = load_dataset(dataset_path)
    assert skipped == 0
    assert len(samples) == DATASET_COUNT
    return samples


@pytest.fixture(scope="session")
def smoke_training(dataset, tmp_path_factory):
    """One smoke-trained model shared by the quality and integration tests."""
    config = TrainConfig(epochs=SMOKE_EPOCHS, seed=7, lr_step_epochs=3)
    model, history = train(dataset, config)
    checkpoint = tmp_path_factory.mktemp("checkpoint") / "guidance.pt"
    save_checkpoint(model, config, history, pos_weight=0.0, path=checkpoint)
    return model, history, checkpoint


# --- evaluation helpers ------------------------------------------------------


def mini_fps(candidates: np.ndarray, n: int) -> np.ndarray:
    chosen = [0]
    dist = np.linalg.norm(candidates - candidates[0], axis=1)
    for _ in range(n - 1):
        idx = int(np.argmax(dist))
        chosen.append(idx)
        dist = np.minimum(dist, np.linalg.norm(candidates - candidates[idx], axis=1))
    return candidates[chosen]


def segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    t = np.clip((points - a) @ ab / (ab @ ab), 0.0, 1.0)
    return np.linalg.norm(points - (a + t[:, None] * ab), axis=1)


def empty_world_eval_case(seed: int, n: int = 2048, side: float = 224.0, eta: float = 10.0):
    """An obstacle-free instance: FPS cloud, features, and capsule labels.

    The reference labels come straight from point-to-segment distance (the
    optimal path of an empty world is the start-goal segment), independent
    of any package code.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    while True:
        start = rng.uniform(20.0, side - 20.0, 2)
        goal = rng.uniform(20.0, side - 20.0, 2)
        if np.linalg.norm(goal - start) >= 80.0:
            break
    candidates = rng.uniform(0.0, side, size=(4 * n, 2))
    points = mini_fps(candidates, n)
    labels = segment_distance(points, start, goal) <= eta
    near_start = np.linalg.norm(points - start, axis=1) <= eta
    near_goal = np.linalg.norm(points - goal, axis=1) <= eta
    features = np.stack([near_start, near_goal], axis=1).astype(np.float32)
    centered = points - points.mean(axis=0)
    scale = np.abs(centered).max()
    normalized = np.hstack([centered / scale, np.zeros((n, 1))]).astype(np.float32)
    return normalized, features, labels


def predict(model, normalized: np.ndarray, features: np.ndarray) -> np.ndarray:
    probs = model.predict_probabilities(
        torch.from_numpy(normalized).unsqueeze(0), torch.from_numpy(features).unsqueeze(0))
    return probs[0].numpy()
