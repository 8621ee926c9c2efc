"""Hierarchical point-set segmentation network for guidance inference.

Single-scale-grouping set-abstraction levels downsample the cloud with
farthest-point sampling and encode local neighborhoods; feature
propagation interpolates back up to per-point logits. Input is the
normalized 3-column coordinates plus the two start/goal proximity
channels; output is one guidance logit per point.
"""

from __future__ import annotations

import torch
from torch import nn


def farthest_point_indices(xyz: torch.Tensor, npoint: int) -> torch.Tensor:
    """Greedy max-min selection; deterministic (starts from index 0)."""
    b, n, _ = xyz.shape
    idx = torch.zeros(b, npoint, dtype=torch.long, device=xyz.device)
    dist = torch.full((b, n), float("inf"), device=xyz.device)
    farthest = torch.zeros(b, dtype=torch.long, device=xyz.device)
    batch = torch.arange(b, device=xyz.device)
    for i in range(npoint):
        idx[:, i] = farthest
        centroid = xyz[batch, farthest].unsqueeze(1)
        dist = torch.minimum(dist, ((xyz - centroid) ** 2).sum(-1))
        farthest = dist.argmax(-1)
    return idx


def gather_points(points: torch.Tensor, idx: torch.Tensor) -> torch.Tensor:
    """points (B, N, C), idx (B, ...) -> (B, ..., C)."""
    b = points.shape[0]
    batch_shape = idx.shape[1:]
    flat = idx.reshape(b, -1)
    out = points.gather(1, flat.unsqueeze(-1).expand(-1, -1, points.shape[-1]))
    return out.reshape(b, *batch_shape, points.shape[-1])


def ball_group(xyz: torch.Tensor, centers: torch.Tensor, radius: float,
               nsample: int) -> torch.Tensor:
    """Indices of up to nsample points within radius of each center.

    Slots with no in-radius point repeat the nearest one (the center
    itself always qualifies since centers come from the cloud).
    """
    dist = torch.cdist(centers, xyz)
    dist = dist.masked_fill(dist > radius, float("inf"))
    knn = dist.argsort(dim=-1)[..., :nsample]
    grouped = dist.gather(-1, knn)
    first = knn[..., :1].expand_as(knn)
    return torch.where(torch.isinf(grouped), first, knn)


class SetAbstraction(nn.Module):
    def __init__(self, npoint: int, radius: float, nsample: int,
                 in_channels: int, mlp: list[int]):
        super().__init__()
        self.npoint = npoint
        self.radius = radius
        self.nsample = nsample
        layers = []
        prev = in_channels + 3  # local offsets concatenated with features
        for out in mlp:
            layers += [nn.Conv2d(prev, out, 1), nn.BatchNorm2d(out), nn.ReLU()]
            prev = out
        self.mlp = nn.Sequential(*layers)

    def forward(self, xyz: torch.Tensor, feats: torch.Tensor):
        idx = farthest_point_indices(xyz, self.npoint)
        centers = gather_points(xyz, idx)
        group_idx = ball_group(xyz, centers, self.radius, self.nsample)
        grouped_xyz = gather_points(xyz, group_idx) - centers.unsqueeze(2)
        grouped = torch.cat([grouped_xyz, gather_points(feats, group_idx)], dim=-1)
        grouped = grouped.permute(0, 3, 1, 2)  # (B, C, npoint, nsample)
        encoded = self.mlp(grouped).max(dim=-1).values
        return centers, encoded.permute(0, 2, 1)


class FeaturePropagation(nn.Module):
    def __init__(self, in_channels: int, mlp: list[int]):
        super().__init__()
        layers = []
        prev = in_channels
        for out in mlp:
            layers += [nn.Conv1d(prev, out, 1), nn.BatchNorm1d(out), nn.ReLU()]
            prev = out
        self.mlp = nn.Sequential(*layers)

    def forward(self, xyz_dense, xyz_sparse, feats_dense, feats_sparse):
        if xyz_sparse.shape[1] == 1:
            interpolated = feats_sparse.expand(-1, xyz_dense.shape[1], -1)
        else:
            dist = torch.cdist(xyz_dense, xyz_sparse)
            k = min(3, xyz_sparse.shape[1])
            near_dist, near_idx = dist.topk(k, dim=-1, largest=False)
            weight = 1.0 / (near_dist + 1e-8)
            weight = weight / weight.sum(dim=-1, keepdim=True)
            interpolated = (gather_points(feats_sparse, near_idx)
                            * weight.unsqueeze(-1)).sum(dim=2)
        merged = torch.cat([interpolated, feats_dense], dim=-1) \
            if feats_dense is not None else interpolated
        out = self.mlp(merged.permute(0, 2, 1))
        return out.permute(0, 2, 1)


def expand_features(points: torch.Tensor, features: torch.Tensor) -> torch.Tensor:
    """Analytic per-point geometry derived from the two proximity channels.

    The wire protocol only carries near-start/near-goal flags; the
    endpoint positions are recovered as the flagged blobs' centroids and
    expanded into distances, focal excess and distance-to-segment. This
    turns the global "am I between the endpoints" question into per-point
    arithmetic, which trains at desk scale; the network still owns the
    obstacle-dependent part.
    """
    w_start = features[..., 0:1]
    w_goal = features[..., 1:2]
    fallback = points.mean(dim=1, keepdim=True)

    def blob_centroid(weights):
        total = weights.sum(dim=1, keepdim=True)
        centroid = (points * weights).sum(dim=1, keepdim=True) / total.clamp(min=1e-9)
        return torch.where(total > 0, centroid, fallback)

    start = blob_centroid(w_start)
    goal = blob_centroid(w_goal)
    d_start = torch.linalg.norm(points - start, dim=-1, keepdim=True)
    d_goal = torch.linalg.norm(points - goal, dim=-1, keepdim=True)
    span = goal - start
    span_sq = (span * span).sum(dim=-1, keepdim=True)
    t = ((points - start) * span).sum(dim=-1, keepdim=True) / span_sq.clamp(min=1e-9)
    t = t.clamp(0.0, 1.0) * (span_sq > 0)
    projection = start + t * span
    d_segment = torch.linalg.norm(points - projection, dim=-1, keepdim=True)
    focal_excess = d_start + d_goal - torch.sqrt(span_sq)
    return torch.cat([features, d_start, d_goal, d_segment, focal_excess], dim=-1)


class GlobalAbstraction(nn.Module):
    """Encode the whole (downsampled) cloud into one feature vector.

    Guidance is a global property: a point halfway between the endpoints
    carries no local evidence of them, so the scene summary has to travel
    back down through feature propagation.
    """

    def __init__(self, in_channels: int, mlp: list[int]):
        super().__init__()
        layers = []
        prev = in_channels + 3
        for out in mlp:
            layers += [nn.Conv1d(prev, out, 1), nn.BatchNorm1d(out), nn.ReLU()]
            prev = out
        self.mlp = nn.Sequential(*layers)

    def forward(self, xyz: torch.Tensor, feats: torch.Tensor) -> torch.Tensor:
        merged = torch.cat([xyz, feats], dim=-1).permute(0, 2, 1)
        return self.mlp(merged).max(dim=-1).values.unsqueeze(1)  # (B, 1, C)


class GuidanceNet(nn.Module):
    """Per-point binary segmentation over (coords, proximity-channel) clouds."""

    EXPANDED_CHANNELS = 6

    def __init__(self, feature_channels: int = 2):
        super().__init__()
        if feature_channels != 2:
            raise ValueError("wire protocol carries exactly two feature channels")
        c = self.EXPANDED_CHANNELS
        # Sized for CPU training at desk scale: two local levels plus a
        # global summary for scene-wide context.
        self.sa1 = SetAbstraction(256, 0.25, 24, c, [48, 48, 96])
        self.sa2 = SetAbstraction(64, 0.5, 48, 96, [96, 96, 192])
        self.sa3 = GlobalAbstraction(192, [192, 256])
        self.fp3 = FeaturePropagation(256 + 192, [192])
        self.fp2 = FeaturePropagation(192 + 96, [128, 96])
        self.fp1 = FeaturePropagation(96 + c + 3, [96, 96])
        self.head = nn.Sequential(
            nn.Conv1d(96, 48, 1), nn.BatchNorm1d(48), nn.ReLU(),
            nn.Dropout(0.3), nn.Conv1d(48, 1, 1),
        )

    def forward(self, points: torch.Tensor, features: torch.Tensor) -> torch.Tensor:
        expanded = expand_features(points, features)
        xyz1, f1 = self.sa1(points, expanded)
        xyz2, f2 = self.sa2(xyz1, f1)
        f3 = self.sa3(xyz2, f2)
        center = xyz2.mean(dim=1, keepdim=True)
        up2 = self.fp3(xyz2, center, f2, f3)
        up1 = self.fp2(xyz1, xyz2, f1, up2)
        dense_skip = torch.cat([points, expanded], dim=-1)
        up0 = self.fp1(points, xyz1, dense_skip, up1)
        return self.head(up0.permute(0, 2, 1)).squeeze(1)

    @torch.no_grad()
    def predict_probabilities(self, points: torch.Tensor, features: torch.Tensor) -> torch.Tensor:
        self.eval()
        return torch.sigmoid(self.forward(points, features))
