import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import nirrt
from nirrt.config import PlannerConfig
from nirrt.errors import ContractViolationError
from nirrt.tree import Tree, extend_and_rewire, in_goal_region, near, nearest, solution_cost, steer

from .oracles import brute_force_near, brute_force_nearest

finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
points_2d = st.lists(st.tuples(finite, finite), min_size=1, max_size=60)


def _tree_from_points(pts):
    tree = Tree(np.asarray(pts[0], dtype=np.float64))
    for p in pts[1:]:
        x = np.asarray(p, dtype=np.float64)
        tree.add(x, 0, float(np.linalg.norm(x - tree.state(0))))
    return tree


def test_nearest_single_vertex():
    tree = Tree(np.array([1.0, 2.0]))
    assert nearest(tree, np.array([50.0, 50.0])) == 0


def test_nearest_exact_vertex():
    tree = _tree_from_points([(0, 0), (3, 4), (10, 10)])
    assert nearest(tree, np.array([3.0, 4.0])) == 1


def test_nearest_tie_breaks_to_lowest_index():
    tree = _tree_from_points([(0, 0), (2, 0), (-2, 0)])
    assert nearest(tree, np.array([0.0, 2.0])) == 0  # all... root is closest
    tree2 = _tree_from_points([(2, 0), (-2, 0)])
    assert nearest(tree2, np.array([0.0, 0.0])) == 0


@given(points_2d, st.tuples(finite, finite))
def test_nearest_matches_brute_force(pts, query):
    tree = _tree_from_points(pts)
    q = np.asarray(query, dtype=np.float64)
    i = nearest(tree, q)
    j = brute_force_nearest(tree.points, q)
    assert np.linalg.norm(tree.state(i) - q) == pytest.approx(
        np.linalg.norm(tree.state(j) - q))
    assert i <= j


@given(points_2d, st.tuples(finite, finite), st.floats(min_value=0, max_value=60))
def test_near_matches_brute_force(pts, query, radius):
    tree = _tree_from_points(pts)
    q = np.asarray(query, dtype=np.float64)
    assert sorted(near(tree, q, radius).tolist()) == brute_force_near(tree.points, q, radius)


def test_near_radius_zero_and_diameter():
    tree = _tree_from_points([(0, 0), (1, 0), (0, 0)])
    assert near(tree, np.array([0.0, 0.0]), 0.0).tolist() == [0, 2]
    assert near(tree, np.array([0.0, 0.0]), 100.0).tolist() == [0, 1, 2]


def test_steer_within_step_returns_target():
    out = steer(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 10.0)
    assert np.array_equal(out, [3.0, 4.0])


def test_steer_truncates_collinear():
    out = steer(np.array([0.0, 0.0]), np.array([10.0, 0.0]), 4.0)
    assert np.allclose(out, [4.0, 0.0])


def test_steer_zero_distance():
    out = steer(np.array([2.0, 2.0]), np.array([2.0, 2.0]), 1.0)
    assert np.array_equal(out, [2.0, 2.0])


def test_steer_property_fuzz():
    rng = nirrt.RngHandle(31)
    for _ in range(10_000):
        a = rng.np.uniform(-100, 100, 2)
        b = rng.np.uniform(-100, 100, 2)
        eta = float(rng.np.uniform(0.1, 30))
        out = steer(a, b, eta)
        expected = min(eta, float(np.linalg.norm(b - a)))
        assert float(np.linalg.norm(out - a)) == pytest.approx(expected, abs=1e-9)


def _empty_cfg(world, **kw):
    return PlannerConfig.for_world(world, **kw)


def test_extend_single_vertex(empty_world_2d):
    cfg = _empty_cfg(empty_world_2d, step_size=5.0, goal_radius=5.0)
    tree = Tree(np.array([0.0, 0.0]))
    idx = extend_and_rewire(tree, np.array([3.0, 0.0]), empty_world_2d, cfg)
    assert idx == 1
    assert np.allclose(tree.state(1), [3.0, 0.0])
    assert tree.parent(1) == 0
    assert tree.cost(1) == pytest.approx(3.0)


def test_extend_blocked_returns_none():
    w = nirrt.World((0, 0), (100, 100), [nirrt.Box((4, -0.5), (6, 0.5))], clearance=0.0)
    cfg = _empty_cfg(w, step_size=10.0)
    tree = Tree(np.array([0.0, 0.0]))
    assert extend_and_rewire(tree, np.array([10.0, 0.0]), w, cfg) is None
    assert tree.size == 1


def test_rewire_hand_case(empty_world_2d):
    # Root at origin; A=(4,0) cost 4; B=(4,3) parented to A with cost 9.
    # Inserting (2,1.5) gives B a cheaper route: 2.5 + 2.5 = 5 < 9.
    cfg = _empty_cfg(empty_world_2d, step_size=5.0)
    tree = Tree(np.array([0.0, 0.0]))
    a = tree.add(np.array([4.0, 0.0]), 0, 4.0)
    b = tree.add(np.array([4.0, 3.0]), a, 9.0)
    new = extend_and_rewire(tree, np.array([2.0, 1.5]), empty_world_2d, cfg)
    assert new is not None
    assert tree.parent(new) == 0
    assert tree.cost(new) == pytest.approx(2.5)
    assert tree.parent(b) == new
    assert tree.cost(b) == pytest.approx(5.0)
    assert tree.parent(a) == 0 and tree.cost(a) == pytest.approx(4.0)


def test_rewire_updates_descendant_costs(empty_world_2d):
    # C sits outside the rewire radius of the new vertex, so its cost can
    # only change by riding on B's improvement.
    cfg = _empty_cfg(empty_world_2d, step_size=5.0)
    tree = Tree(np.array([0.0, 0.0]))
    a = tree.add(np.array([4.0, 0.0]), 0, 4.0)
    b = tree.add(np.array([4.0, 3.0]), a, 9.0)
    c = tree.add(np.array([4.0, 9.0]), b, 15.0)
    extend_and_rewire(tree, np.array([2.0, 1.5]), empty_world_2d, cfg)
    assert tree.parent(c) == b
    assert tree.cost(c) == pytest.approx(11.0)


def _assert_cost_consistent(tree):
    for v in range(1, tree.size):
        p = tree.parent(v)
        edge = float(np.linalg.norm(tree.state(v) - tree.state(p)))
        assert tree.cost(v) == pytest.approx(tree.cost(p) + edge, abs=1e-9)


def test_cost_consistency_after_random_extensions(cluttered_world_2d):
    cfg = PlannerConfig.for_world(cluttered_world_2d)
    rng = nirrt.RngHandle(77)
    tree = Tree(np.array([10.0, 10.0]))
    inserted = 0
    while inserted < 1000:
        x = rng.np.uniform(0, 224, 2)
        if extend_and_rewire(tree, x, cluttered_world_2d, cfg) is not None:
            inserted += 1
    _assert_cost_consistent(tree)
    # Every parent link still passes the collision check it was inserted under.
    for v in range(1, tree.size):
        assert nirrt.collision_free_segment(cluttered_world_2d, tree.state(tree.parent(v)),
                                            tree.state(v), cfg.collision_resolution)


def test_in_goal_region_boundary(empty_world_2d):
    cfg = _empty_cfg(empty_world_2d, goal_radius=5.0)
    goal = np.array([10.0, 10.0])
    assert in_goal_region(goal, goal, cfg)
    assert in_goal_region(np.array([15.0, 10.0]), goal, cfg)
    assert not in_goal_region(np.array([15.0 + 1e-9, 10.0]), goal, cfg)


def test_solution_cost_empty_and_single():
    tree = Tree(np.array([0.0, 0.0]))
    goal = np.array([10.0, 0.0])
    assert solution_cost(tree, set(), goal) == float("inf")
    v = tree.add(np.array([8.0, 0.0]), 0, 40.0)
    assert solution_cost(tree, {v}, goal) == pytest.approx(42.0)


def test_solution_cost_matches_brute_force(rng):
    tree = Tree(np.array([0.0, 0.0]))
    goal = np.array([50.0, 50.0])
    soln = set()
    for _ in range(40):
        x = rng.np.uniform(0, 100, 2)
        v = tree.add(x, 0, float(rng.np.uniform(0, 200)))
        if rng.np.random() < 0.4:
            soln.add(v)
    expected = min(tree.cost(v) + float(np.linalg.norm(tree.state(v) - goal)) for v in soln)
    assert solution_cost(tree, soln, goal) == pytest.approx(expected)


def test_nearest_empty_tree_contract():
    tree = Tree(np.array([0.0, 0.0]))
    tree.size = 0  # simulate misuse
    with pytest.raises(ContractViolationError):
        nearest(tree, np.array([0.0, 0.0]))
