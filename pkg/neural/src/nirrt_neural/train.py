"""Training loop and checkpointing for the guidance model."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader

from .data import GuidanceDataset, TrainingSample
from .model import GuidanceNet


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3    # initial; halves every lr_step_epochs
    batch_size: int = 16
    epochs: int = 100
    val_fraction: float = 0.1
    seed: int = 0
    # None = sqrt(neg/pos) from the training labels; guidance labels are
    # heavily imbalanced (thin capsule vs whole cloud).
    pos_weight: float | None = None
    lr_step_epochs: int = 30
    lr_decay: float = 0.5
    device: str = "cpu"


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    val_iou: float

    def to_json(self) -> dict:
        return asdict(self)


def split_by_world(samples: list[TrainingSample], val_fraction: float,
                   seed: int) -> tuple[list[TrainingSample], list[TrainingSample]]:
    """Deterministic train/val split; one record per world, so splitting by
    record index keeps all points of a world on one side."""
    order = np.random.Generator(np.random.PCG64(seed)).permutation(len(samples))
    n_val = max(1, int(round(len(samples) * val_fraction))) if len(samples) > 1 else 0
    val_idx = set(order[:n_val].tolist())
    train = [s for i, s in enumerate(samples) if i not in val_idx]
    val = [s for i, s in enumerate(samples) if i in val_idx]
    return train, val


def _auto_pos_weight(samples: list[TrainingSample]) -> float:
    pos = sum(float(s.labels.sum()) for s in samples)
    neg = sum(float((1.0 - s.labels).sum()) for s in samples)
    if pos == 0:
        return 1.0
    return math.sqrt(neg / pos)


@torch.no_grad()
def evaluate(model: GuidanceNet, loader: DataLoader, criterion) -> tuple[float, float, float]:
    model.eval()
    losses = []
    correct = total = 0
    intersection = union = 0
    for points, features, labels in loader:
        logits = model(points, features)
        losses.append(float(criterion(logits, labels)))
        pred = torch.sigmoid(logits) > 0.5
        truth = labels > 0.5
        correct += int((pred == truth).sum())
        total += truth.numel()
        intersection += int((pred & truth).sum())
        union += int((pred | truth).sum())
    iou = intersection / union if union else 1.0
    return float(np.mean(losses)), correct / total, iou


def train(samples: list[TrainingSample], config: TrainConfig,
          checkpoint_path: str | Path | None = None) -> tuple[GuidanceNet, list[EpochStats]]:
    torch.manual_seed(config.seed)
    train_samples, val_samples = split_by_world(samples, config.val_fraction, config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    train_loader = DataLoader(GuidanceDataset(train_samples), batch_size=config.batch_size,
                              shuffle=True, generator=generator)
    val_loader = DataLoader(GuidanceDataset(val_samples or train_samples),
                            batch_size=config.batch_size)

    model = GuidanceNet().to(config.device)
    pos_weight = config.pos_weight if config.pos_weight is not None \
        else _auto_pos_weight(train_samples)
    criterion = torch.nn.BCEWithLogitsLoss(pos_weight=torch.tensor(pos_weight))
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    scheduler = torch.optim.lr_scheduler.StepLR(optimizer, step_size=config.lr_step_epochs,
                                                gamma=config.lr_decay)

    history: list[EpochStats] = []
    for epoch in range(config.epochs):
        model.train()
        losses = []
        for points, features, labels in train_loader:
            optimizer.zero_grad()
            loss = criterion(model(points, features), labels)
            loss.backward()
            optimizer.step()
            losses.append(float(loss.detach()))
        scheduler.step()
        val_loss, val_acc, val_iou = evaluate(model, val_loader, criterion)
        history.append(EpochStats(epoch, float(np.mean(losses)), val_loss, val_acc, val_iou))

    if checkpoint_path is not None:
        save_checkpoint(model, config, history, pos_weight, checkpoint_path)
    return model, history


def save_checkpoint(model: GuidanceNet, config: TrainConfig, history: list[EpochStats],
                    pos_weight: float, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save({
        "state_dict": model.state_dict(),
        "config": asdict(config),
        "pos_weight": pos_weight,
        "history": [h.to_json() for h in history],
    }, path)


def load_checkpoint(path: str | Path) -> GuidanceNet:
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    model = GuidanceNet()
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
