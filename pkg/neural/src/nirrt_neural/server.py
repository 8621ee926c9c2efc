"""Inference server implementing the guidance wire protocol.

POST /infer takes {"points": [[x, y, z], ...], "features": [[s, g], ...]}
and returns {"probabilities": [...]} of matching length; malformed bodies
get HTTP 400 with a reason. GET /healthz reports liveness.
"""

from __future__ import annotations

import threading

import numpy as np
import torch
from fastapi import FastAPI, HTTPException, Request

from .model import GuidanceNet
from .train import load_checkpoint


def _parse_request(body) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(body, dict):
        raise HTTPException(status_code=400, detail="request body must be a JSON object")
    for key in ("points", "features"):
        if key not in body:
            raise HTTPException(status_code=400, detail=f"missing field {key!r}")
    try:
        points = np.asarray(body["points"], dtype=np.float32)
        features = np.asarray(body["features"], dtype=np.float32)
    except (TypeError, ValueError):
        raise HTTPException(status_code=400, detail="points/features must be numeric arrays")
    if points.ndim != 2 or points.shape[1] != 3:
        raise HTTPException(status_code=400, detail="points must be an N x 3 array")
    if features.ndim != 2 or features.shape[1] != 2:
        raise HTTPException(status_code=400, detail="features must be an N x 2 array")
    if len(points) != len(features):
        raise HTTPException(
            status_code=400,
            detail=f"length mismatch: {len(points)} points vs {len(features)} features")
    if len(points) == 0:
        raise HTTPException(status_code=400, detail="empty point cloud")
    if not (np.isfinite(points).all() and np.isfinite(features).all()):
        raise HTTPException(status_code=400, detail="non-finite values in request")
    return points, features


def create_app(model: GuidanceNet) -> FastAPI:
    app = FastAPI(title="guidance-inference")
    # Model inference is serialized; callers only see the blocking HTTP
    # contract, so concurrent requests simply queue.
    lock = threading.Lock()

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/infer")
    async def infer(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body is not valid JSON")
        points, features = _parse_request(body)
        with lock:
            probs = model.predict_probabilities(
                torch.from_numpy(points).unsqueeze(0),
                torch.from_numpy(features).unsqueeze(0),
            )[0]
        return {"probabilities": probs.numpy().astype(float).tolist()}

    return app


def serve(checkpoint_path: str, host: str = "127.0.0.1", port: int = 8040) -> None:
    import uvicorn

    model = load_checkpoint(checkpoint_path)
    uvicorn.run(create_app(model), host=host, port=port, log_level="warning")
