"""Geometric primitives shared by every other module.

Clouds are stored as read-only ``(n, 2)`` float64 arrays; all angles are
radians normalized to ``[0, 2*pi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class CloudError(ValueError):
    """Invalid point cloud (empty, non-finite, duplicated points, ...)."""


class DegenerateCloudError(CloudError):
    pass


class Point2(NamedTuple):
    x: float
    y: float


def normalize_angle(theta: float) -> float:
    """Reduce ``theta`` into ``[0, 2*pi)``."""
    r = math.fmod(theta, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative value can round up to exactly 2*pi
    if r >= TWO_PI:
        r = 0.0
    return r


def normalize_angles(theta: np.ndarray) -> np.ndarray:
    """Vectorized :func:`normalize_angle`; bit-identical to the scalar form."""
    r = np.fmod(theta, TWO_PI)
    r = np.where(r < 0.0, r + TWO_PI, r)
    return np.where(r >= TWO_PI, 0.0, r)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered set of distinct 2D points with an optional label."""

    points: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise CloudError(f"points must have shape (n, 2), got {pts.shape}")
        if len(pts) == 0:
            raise CloudError("point cloud must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise CloudError("point coordinates must be finite")
        dup = first_duplicate(pts)
        if dup is not None:
            raise CloudError(f"duplicate point at index {dup[1]} (same as index {dup[0]})")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> Point2:
        x, y = self.points[i]
        return Point2(float(x), float(y))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.label, self.points.tobytes()))

    def with_label(self, label: Optional[str]) -> "PointCloud":
        return PointCloud(self.points, label)


def first_duplicate(pts: np.ndarray) -> Optional[tuple[int, int]]:
    """Return ``(first, later)`` indices of the earliest repeated point, if any."""
    seen: dict[tuple[float, float], int] = {}
    for k, (x, y) in enumerate(pts.tolist()):
        # -0.0 and 0.0 compare equal and must count as the same point
        key = (x + 0.0, y + 0.0)
        if key in seen:
            return seen[key], k
        seen[key] = k
    return None


@dataclass(frozen=True)
class RigidMotion:
    """Rotation by ``theta`` after moving ``X[pivot_from]`` and ``Y[pivot_to]`` to the origin."""

    theta: float
    pivot_from: int
    pivot_to: int

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class MatchPair:
    i: int
    j: int
    distance: float


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(p: Point2 | Sequence[float], theta: float) -> Point2:
    x, y = p
    c, s = math.cos(theta), math.sin(theta)
    return Point2(x * c - y * s, x * s + y * c)


def rotate_points(pts: np.ndarray, theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    x, y = pts[:, 0], pts[:, 1]
    return np.column_stack((x * c - y * s, x * s + y * c))


def translate_to_pivot(cloud: PointCloud, p: int) -> PointCloud:
    """Shift ``cloud`` so that point ``p`` sits exactly at the origin."""
    check_index(p, len(cloud), "pivot")
    return PointCloud(cloud.points - cloud.points[p], cloud.label)


def check_index(k: int, n: int, what: str = "index") -> None:
    if not (0 <= k < n):
        raise IndexError(f"{what} {k} out of range for cloud of size {n}")


def min_pairwise_distance(cloud: PointCloud) -> float:
    """Smallest distance between two distinct points of ``cloud``."""
    n = len(cloud)
    if n < 2:
        raise DegenerateCloudError("minimum pairwise distance needs at least two points")
    pts = cloud.points
    best = math.inf
    # row-wise to keep memory linear for large clouds
    for i in range(n - 1):
        d = np.hypot(pts[i + 1:, 0] - pts[i, 0], pts[i + 1:, 1] - pts[i, 1])
        best = min(best, float(d.min()))
    return best


@dataclass(frozen=True)
class DeltaCheck:
    min_distance: float
    delta: float
    ok: bool

    @property
    def half_min_distance(self) -> float:
        return self.min_distance / 2.0


def validate_delta(X: PointCloud, Y: PointCloud, delta: float) -> DeltaCheck:
    """Check the injectivity condition ``delta < min(Delta(X), Delta(Y)) / 2``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    dmin = min(min_pairwise_distance(X), min_pairwise_distance(Y))
    return DeltaCheck(dmin, delta, delta < dmin / 2.0)
