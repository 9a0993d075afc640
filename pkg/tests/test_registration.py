import math

import numpy as np
import pytest

from cloudmatch.core import TWO_PI, CloudError, PointCloud, rotate_points
from cloudmatch.registration import (
    StrictDeltaError,
    count_matches,
    energy,
    extract_correspondences,
    pivot_table,
    register,
    solve_pivot,
)

from .conftest import random_cloud


def test_counterexample_pivot_energy(triangle, segment):
    # apex of the triangle against the first end of the segment
    theta0 = 1.5 * math.pi
    assert count_matches(triangle, segment, 2, 0, theta0, 2.0) == 2
    assert energy(triangle, segment, 2, 0, theta0, 2.0) == 0
    # aligning the segment with a triangle side instead only reaches one match
    assert count_matches(triangle, segment, 2, 0, 4 * math.pi / 3, 2.0) == 1


def test_counterexample_register(triangle, segment):
    wide = register(triangle, segment, 2.0)
    assert wide.k_total == 3 and wide.energy == 0
    assert wide.non_injective and not wide.delta_ok
    assert len(wide.pairs) == 2
    narrow = register(triangle, segment, 1.0)
    assert narrow.k_total == 2 and narrow.energy == 1
    assert not narrow.non_injective and narrow.delta_ok


def test_strict_delta(triangle, segment):
    with pytest.raises(StrictDeltaError):
        register(triangle, segment, 2.0, strict_delta=True)
    assert register(triangle, segment, 1.0, strict_delta=True).delta_ok


def test_energy_plus_count_is_constant(rng):
    X, Y = random_cloud(rng, 7), random_cloud(rng, 5)
    for theta in rng.random(20) * TWO_PI:
        for p, q in [(0, 0), (3, 2), (6, 4)]:
            total = count_matches(X, Y, p, q, theta, 0.2) + energy(X, Y, p, q, theta, 0.2)
            assert total == 6 * 4


def test_single_points():
    X = PointCloud([[1.0, 2.0]])
    Y = PointCloud([[-3.0, 0.5]])
    res = register(X, Y, 0.1)
    assert res.k_total == 1 and res.energy == 0 and res.theta == 0.0
    assert [(m.i, m.j) for m in res.pairs] == [(0, 0)]


def test_self_match_is_identity(rng):
    X = random_cloud(rng, 25)
    res = register(X, X, 1e-6)
    assert res.k_total == 25 and res.energy == 24 * 24 - 24
    assert (res.best.p, res.best.q) == (0, 0)
    assert min(res.best.midpoint, TWO_PI - res.best.midpoint) < 1e-5
    assert all(m.i == m.j for m in res.pairs) and len(res.pairs) == 25


def test_recovers_rotation_of_copy(rng):
    X = random_cloud(rng, 30)
    theta0 = 2.3
    Y = PointCloud(rotate_points(X.points, theta0) + [5.0, -1.0])
    res = register(X, Y, 1e-4)
    assert res.k_total == 30
    assert abs(res.best.midpoint - (TWO_PI - theta0)) < 1e-3


def test_symmetric_in_x_and_y(rng):
    for _ in range(10):
        X, Y = random_cloud(rng, 8), random_cloud(rng, 6)
        assert register(X, Y, 0.08).k_total == register(Y, X, 0.08).k_total


def test_solve_pivot_agrees_with_table(rng):
    X, Y = random_cloud(rng, 9), random_cloud(rng, 7)
    k, th, pe = pivot_table(X, Y, 0.1)
    for p in range(9):
        for q in range(7):
            s = solve_pivot(X, Y, p, q, 0.1)
            assert (s.k_total, s.theta, s.plateau[1]) == (k[p, q], th[p, q], pe[p, q])
            assert count_matches(X, Y, p, q, s.midpoint, 0.1) + 1 == s.k_total


def test_threads_do_not_change_result(rng):
    X, Y = random_cloud(rng, 40), random_cloud(rng, 35)
    a = register(X, Y, 0.05, workers=1)
    b = register(X, Y, 0.05, workers=4)
    assert a == b


def test_deterministic(rng):
    X, Y = random_cloud(rng, 20), random_cloud(rng, 20)
    assert register(X, Y, 0.05) == register(X, Y, 0.05)


def test_all_solutions(rng):
    X = random_cloud(rng, 6)
    res = register(X, X, 1e-6, all_solutions=True)
    pivots = [(s.p, s.q) for s in res.all_optima]
    assert pivots == [(i, i) for i in range(6)]
    assert all(s.k_total == 6 for s in res.all_optima)
    assert register(X, X, 1e-6).all_optima is None


def test_extract_correspondences_greedy():
    X = PointCloud([[0.0, 0.0], [1.0, 0.0], [1.05, 0.0]])
    Y = PointCloud([[0.0, 0.0], [1.02, 0.0]])
    pairs, flag = extract_correspondences(X, Y, 0, 0, 0.0, 0.1)
    assert flag
    assert [(m.i, m.j) for m in pairs] == [(0, 0), (1, 1)]
    assert pairs[1].distance == pytest.approx(0.02)


def test_bad_arguments(triangle, segment):
    with pytest.raises(ValueError):
        register(triangle, segment, 0.0)
    with pytest.raises(IndexError):
        solve_pivot(triangle, segment, 3, 0, 1.0)
    with pytest.raises(CloudError):
        PointCloud(np.empty((0, 2)))


def test_correspondences_are_injective_when_delta_ok(rng):
    X, Y = random_cloud(rng, 30), random_cloud(rng, 30)
    res = register(X, Y, 0.005)
    assert res.delta_ok or not res.non_injective
    assert len({m.i for m in res.pairs}) == len(res.pairs)
    assert len({m.j for m in res.pairs}) == len(res.pairs)
