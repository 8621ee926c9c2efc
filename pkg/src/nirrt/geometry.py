"""Dimension-generic states, distances and sampling primitives.

A state is a plain float64 numpy vector of length 2 or 3, in world units
(pixels in 2D, voxels in 3D).
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolationError
from .rng import RngHandle

State = np.ndarray

SUPPORTED_DIMS = (2, 3)


def as_state(x, dim: int | None = None) -> State:
    """Coerce to a float64 state vector, validating finiteness and dimension."""
    s = np.asarray(x, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] not in SUPPORTED_DIMS:
        raise ContractViolationError(f"state must be a 2- or 3-vector, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ContractViolationError(f"state has non-finite coordinates: {s}")
    if dim is not None and s.shape[0] != dim:
        raise ContractViolationError(f"expected dimension {dim}, got {s.shape[0]}")
    return s


def check_same_dim(a: State, b: State) -> int:
    if a.shape[-1] != b.shape[-1]:
        raise ContractViolationError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a.shape[-1]


def distance(a: State, b: State) -> float:
    """Euclidean distance between two states of the same dimension."""
    a = as_state(a)
    b = as_state(b)
    check_same_dim(a, b)
    return float(np.linalg.norm(a - b))


def sample_uniform_box(lo: State, hi: State, rng: RngHandle) -> State:
    """Uniform sample from the axis-aligned box [lo, hi]."""
    lo = as_state(lo)
    hi = as_state(hi)
    check_same_dim(lo, hi)
    if np.any(lo > hi):
        raise ContractViolationError(f"box is empty: lo={lo} exceeds hi={hi}")
    return sample_uniform_box_batch(lo, hi, 1, rng)[0]


def sample_uniform_box_batch(lo: State, hi: State, n: int, rng: RngHandle) -> np.ndarray:
    """n uniform samples from [lo, hi], shape (n, d)."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if np.any(lo > hi):
        raise ContractViolationError(f"box is empty: lo={lo} exceeds hi={hi}")
    u = rng.np.random((n, lo.shape[0]))
    return lo + u * (hi - lo)


def sample_unit_ball(d: int, rng: RngHandle) -> State:
    """Uniform sample from the closed unit d-ball."""
    if d not in SUPPORTED_DIMS:
        raise ContractViolationError(f"dimension must be 2 or 3, got {d}")
    return sample_unit_ball_batch(d, 1, rng)[0]


def sample_unit_ball_batch(d: int, n: int, rng: RngHandle) -> np.ndarray:
    """n uniform samples from the unit d-ball, shape (n, d).

    Rejection-free: a normalized Gaussian gives the direction, and scaling
    the radius by u^(1/d) makes the radial density proportional to r^(d-1).
    """
    if d not in SUPPORTED_DIMS:
        raise ContractViolationError(f"dimension must be 2 or 3, got {d}")
    g = rng.np.normal(size=(n, d))
    norms = np.linalg.norm(g, axis=1)
    # A zero Gaussian vector has probability ~0 but would divide by zero.
    norms[norms == 0.0] = 1.0
    radii = rng.np.random(n) ** (1.0 / d)
    return g * (radii / norms)[:, None]
