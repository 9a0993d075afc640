import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cloudmatch.core import (
    TWO_PI,
    CloudError,
    DegenerateCloudError,
    Point2,
    PointCloud,
    RigidMotion,
    normalize_angle,
    normalize_angles,
    rotate,
    rotate_points,
    translate_to_pivot,
    min_pairwise_distance,
    validate_delta,
)

from .conftest import SIDE

coords = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
angles = st.floats(-50.0, 50.0, allow_nan=False, allow_infinity=False)


def test_rotate_examples():
    assert rotate((1.0, 0.0), 0.0) == (1.0, 0.0)
    x, y = rotate((1.0, 0.0), math.pi / 2)
    assert x == pytest.approx(0.0, abs=1e-15) and y == pytest.approx(1.0)
    x, y = rotate(Point2(3.0, 4.0), math.pi)
    assert (x, y) == (pytest.approx(-3.0), pytest.approx(-4.0))
    assert math.hypot(x, y) == pytest.approx(5.0, rel=1e-15)


@given(coords, coords, angles)
def test_rotate_preserves_norm(x, y, theta):
    rx, ry = rotate((x, y), theta)
    n = math.hypot(x, y)
    assert abs(math.hypot(rx, ry) - n) <= 4 * math.ulp(max(n, 1e-300)) + 1e-300


def test_rotate_points_matches_scalar(rng):
    pts = rng.normal(size=(20, 2))
    out = rotate_points(pts, 0.7)
    for (a, b), (c, d) in zip(pts, out):
        assert rotate((a, b), 0.7) == pytest.approx((c, d), abs=1e-15)


@pytest.mark.parametrize(
    "pts, p, expected",
    [
        ([[1, 1], [2, 3]], 0, [[0, 0], [1, 2]]),
        ([[0, 0]], 0, [[0, 0]]),
        ([[2, 0], [5, 4]], 1, [[-3, -4], [0, 0]]),
    ],
)
def test_translate_to_pivot_examples(pts, p, expected):
    assert np.array_equal(translate_to_pivot(PointCloud(pts), p).points, np.array(expected, float))


def test_translate_to_pivot_out_of_range():
    with pytest.raises(IndexError):
        translate_to_pivot(PointCloud([[0, 0], [1, 1]]), 2)


@settings(max_examples=50)
@given(st.lists(st.tuples(coords, coords), min_size=2, max_size=12, unique=True), st.data())
def test_translate_preserves_distances(pts, data):
    cloud = PointCloud(pts)
    # translation may otherwise round two nearby points onto each other
    assume(min_pairwise_distance(cloud) > 1e-9)
    p = data.draw(st.integers(0, len(pts) - 1))
    moved = translate_to_pivot(cloud, p).points
    assert np.array_equal(moved[p], [0.0, 0.0])
    a, b = cloud.points, moved
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            d0 = math.hypot(*(a[i] - a[j]))
            d1 = math.hypot(*(b[i] - b[j]))
            # translation rounds each coordinate once
            assert abs(d0 - d1) <= 4 * math.ulp(max(np.abs(a).max(), 1.0)) * 4


def test_min_pairwise_distance_examples():
    assert min_pairwise_distance(PointCloud([[0, 0], [3, 4]])) == 5.0
    tri = PointCloud([[0.0, 0.0], [SIDE, 0.0], [SIDE / 2, 3.0]])
    assert min_pairwise_distance(tri) == pytest.approx(2 * math.sqrt(3), rel=1e-14)
    assert min_pairwise_distance(PointCloud([[0, 0], [1, 0], [1.5, 0]])) == 0.5


def test_min_pairwise_distance_singleton():
    with pytest.raises(DegenerateCloudError):
        min_pairwise_distance(PointCloud([[1.0, 2.0]]))


def test_min_pairwise_distance_permutation_invariant(rng):
    pts = rng.random((30, 2))
    d = min_pairwise_distance(PointCloud(pts))
    for _ in range(5):
        assert min_pairwise_distance(PointCloud(pts[rng.permutation(30)])) == d


def test_validate_delta_examples(triangle, segment):
    r = validate_delta(triangle, segment, 2.0)
    assert r.min_distance == pytest.approx(SIDE) and not r.ok
    assert validate_delta(triangle, segment, 1.0).ok
    square = PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]])
    r = validate_delta(square, square, 0.49)
    assert r.min_distance == 1.0 and r.ok
    with pytest.raises(ValueError):
        validate_delta(square, square, 0.0)


def test_validate_delta_implies_injective_matching(rng):
    grid = np.linspace(0, TWO_PI, 2000, endpoint=False)
    for _ in range(20):
        X = PointCloud(rng.random((6, 2)))
        Y = PointCloud(rng.random((5, 2)))
        dmin = min(min_pairwise_distance(X), min_pairwise_distance(Y))
        delta = 0.999 * dmin / 2
        assert validate_delta(X, Y, delta).ok
        # place random pivots, then sweep theta densely
        xs = X.points - X.points[0]
        ys = Y.points - Y.points[0]
        for theta in grid[::7]:
            ry = rotate_points(ys, theta)
            d = np.hypot(xs[:, None, 0] - ry[None, :, 0], xs[:, None, 1] - ry[None, :, 1])
            close = d <= delta
            assert close.sum(axis=1).max() <= 1
            assert close.sum(axis=0).max() <= 1


def test_pointcloud_rejects_bad_input():
    with pytest.raises(CloudError):
        PointCloud([[0, 0], [0, 0]])
    with pytest.raises(CloudError):
        PointCloud([[0.0, 0.0], [-0.0, 0.0]])
    with pytest.raises(CloudError):
        PointCloud(np.empty((0, 2)))
    with pytest.raises(CloudError):
        PointCloud([[0, float("nan")]])
    with pytest.raises(CloudError):
        PointCloud([[0, 1, 2]])


def test_pointcloud_is_immutable():
    c = PointCloud([[0, 0], [1, 1]])
    with pytest.raises(ValueError):
        c.points[0, 0] = 5.0


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_normalize_angle_range(theta):
    r = normalize_angle(theta)
    assert 0.0 <= r < TWO_PI
    assert normalize_angles(np.array([theta]))[0] == r


def test_normalize_angle_tiny_negative():
    assert normalize_angle(-1e-300) < TWO_PI
    assert RigidMotion(-math.pi / 2, 0, 0).theta == pytest.approx(1.5 * math.pi)
