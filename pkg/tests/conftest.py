import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import nirrt

settings.register_profile(
    "default",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return nirrt.RngHandle(12345)


@pytest.fixture
def empty_world_2d():
    return nirrt.World((0.0, 0.0), (224.0, 224.0), [], clearance=0.0)


@pytest.fixture
def empty_problem_2d(empty_world_2d):
    return nirrt.ProblemInstance(empty_world_2d, np.array([20.0, 112.0]), np.array([204.0, 112.0]))


@pytest.fixture
def cluttered_world_2d():
    obstacles = [
        nirrt.Box((60.0, 40.0), (100.0, 120.0)),
        nirrt.Box((140.0, 90.0), (200.0, 130.0)),
        nirrt.Ball((50.0, 180.0), 18.0),
    ]
    return nirrt.World((0.0, 0.0), (224.0, 224.0), obstacles, clearance=3.0)
