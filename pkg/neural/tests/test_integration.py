"""End-to-end: the planner's remote provider against a live inference server.

The planner side is exercised purely through its CLI; the server runs the
smoke-trained checkpoint in a background uvicorn instance.
"""

import json
import socket
import threading
import time

import pytest
import requests
import uvicorn

from nirrt_neural.server import create_app
from nirrt_neural.train import load_checkpoint

from .conftest import planner_cli

N_INTEGRATION_PLANS = 20


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture(scope="module")
def live_server(smoke_training):
    _, _, checkpoint = smoke_training
    model = load_checkpoint(checkpoint)
    port = _free_port()
    config = uvicorn.Config(create_app(model), host="127.0.0.1", port=port,
                            log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            if requests.get(f"{url}/healthz", timeout=1).status_code == 200:
                break
        except requests.RequestException:
            time.sleep(0.1)
    else:
        raise RuntimeError("inference server did not come up")
    yield url
    server.should_exit = True
    thread.join(timeout=5)


def test_remote_protocol_round_trip(live_server):
    body = {"points": [[0.1, 0.2, 0.0]] * 2048, "features": [[0, 0]] * 2048}
    response = requests.post(f"{live_server}/infer", json=body, timeout=30)
    assert response.status_code == 200
    probs = response.json()["probabilities"]
    assert len(probs) == 2048
    assert all(0.0 <= p <= 1.0 for p in probs)


def test_planner_completes_integration_plans(live_server, tmp_path):
    worlds = tmp_path / "worlds"
    planner_cli(["gen-worlds", "--family", "center-block",
                 "--count", str(N_INTEGRATION_PLANS), "--seed", "17",
                 "--out", str(worlds)])
    completed = 0
    guided = 0
    for world_file in sorted(worlds.glob("*.json")):
        record_path = tmp_path / f"{world_file.stem}.run.json"
        planner_cli(["plan", "--world", str(world_file), "--planner", "nirrt-png-fc",
                     "--provider", f"remote:{live_server}", "--iters", "300",
                     "--seed", "5", "--out", str(record_path)])
        record = json.loads(record_path.read_text())
        events = [name for _, name in record["events"]]
        assert "guidance_unavailable" not in events
        assert "guidance" in events
        guided += events.count("guidance") + events.count("retrigger")
        if record["final_cost"] is not None and record["final_cost"] < float("inf"):
            completed += 1
    print(f"\n[{'PASS' if completed == N_INTEGRATION_PLANS else 'FAIL'}] "
          f"integration: {completed}/{N_INTEGRATION_PLANS} plans completed against the "
          f"live server ({guided} guidance calls)")
    assert completed == N_INTEGRATION_PLANS
