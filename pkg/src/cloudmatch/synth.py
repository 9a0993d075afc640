"""Seeded generators for the synthetic benchmark clouds.

Every generator takes an explicit 64-bit seed and draws from a PCG64 stream.
Normal deviates come from the Box-Muller transform applied to that stream's
uniforms, so the outputs only depend on the uniform sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import TWO_PI, PointCloud, first_duplicate, rotate_points

ELLIPSE_DELETIONS = ((51, 69), (111, 169), (196, 199))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_seed(seed: int, *keys: int) -> int:
    """Independent child seed for e.g. one trial of an experiment."""
    ss = np.random.SeedSequence([int(seed), *map(int, keys)])
    return int(ss.generate_state(1, np.uint64)[0])


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Box-Muller: pairs of uniforms -> pairs of N(0, 1) deviates."""
    half = (size + 1) // 2
    u = rng.random((half, 2))
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    phi = TWO_PI * u[:, 1]
    return np.column_stack((r * np.cos(phi), r * np.sin(phi))).ravel()[:size]


def gen_sine(n: int) -> PointCloud:
    if n < 2:
        raise ValueError("sine curve needs at least 2 samples")
    t = TWO_PI * np.arange(n) / (n - 1)
    return PointCloud(np.column_stack((t, np.sin(t))), "sine")


def ellipse_points(n: int, a: float = 3.0, b: float = 2.0) -> np.ndarray:
    # both ends of [0, 2pi] are sampled; the half-turn then maps samples between samples
    t = TWO_PI * np.arange(n) / (n - 1) if n > 1 else np.zeros(1)
    return np.column_stack((a * np.cos(t), b * np.sin(t)))


def kept_indices(n: int, deleted_ranges: Sequence[tuple[int, int]]) -> np.ndarray:
    """0-based indices surviving the 1-based inclusive ``deleted_ranges``."""
    keep = np.ones(n, dtype=bool)
    spans = sorted((int(lo), int(hi)) for lo, hi in deleted_ranges)
    prev_hi = 0
    for lo, hi in spans:
        if not 1 <= lo <= hi <= n:
            raise ValueError(f"deleted range [{lo}, {hi}] outside [1, {n}]")
        if lo <= prev_hi:
            raise ValueError(f"deleted range [{lo}, {hi}] overlaps a previous range")
        keep[lo - 1:hi] = False
        prev_hi = hi
    return np.flatnonzero(keep)


def gen_ellipse_partial(
    n: int = 200,
    deleted_ranges: Sequence[tuple[int, int]] = ELLIPSE_DELETIONS,
    n_outliers: int = 50,
    outlier_sigma: float = 2.0,
    seed: int = 0,
) -> PointCloud:
    """Ellipse ``(3 cos t, 2 sin t)`` with index ranges removed and Gaussian outliers appended."""
    if n < 1:
        raise ValueError("n must be positive")
    if n_outliers < 0 or outlier_sigma < 0:
        raise ValueError("outlier count and sigma must be nonnegative")
    curve = ellipse_points(n)[kept_indices(n, deleted_ranges)]
    rng = make_rng(seed)
    pts = np.vstack((curve, np.empty((0, 2))))
    while len(pts) < len(curve) + n_outliers:
        need = len(curve) + n_outliers - len(pts)
        cand = outlier_sigma * standard_normals(rng, 2 * need).reshape(need, 2)
        pts = _append_distinct(pts, cand)
    if len(pts) == 0:
        raise ValueError("every point was deleted and no outliers were requested")
    return PointCloud(pts, "ellipse")


def gen_disk_cloud(n: int, seed: int) -> PointCloud:
    """``n`` distinct points uniform on the unit disk."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(seed)
    pts = np.empty((0, 2))
    while len(pts) < n:
        u = rng.random((n - len(pts), 2))
        r = np.sqrt(u[:, 0])
        phi = TWO_PI * u[:, 1]
        pts = _append_distinct(pts, np.column_stack((r * np.cos(phi), r * np.sin(phi))))
    return PointCloud(pts, "disk")


def _append_distinct(pts: np.ndarray, cand: np.ndarray) -> np.ndarray:
    out = np.vstack((pts, cand))
    while (dup := first_duplicate(out)) is not None:
        # redraw happens in the caller's loop
        out = np.delete(out, dup[1], axis=0)
    return out


def add_gaussian_noise(cloud: PointCloud, sigma: float, seed: int) -> PointCloud:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return cloud
    noise = sigma * standard_normals(make_rng(seed), 2 * len(cloud)).reshape(-1, 2)
    return PointCloud(cloud.points + noise, cloud.label)


def rotate_cloud(cloud: PointCloud, theta: float) -> PointCloud:
    return PointCloud(rotate_points(cloud.points, theta), cloud.label)


def take_subset(cloud: PointCloud, indices: Sequence[int]) -> PointCloud:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= len(cloud)):
        raise IndexError("subset index out of range")
    return PointCloud(cloud.points[idx], cloud.label)


def random_subset_indices(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    if not 0 < k <= n:
        raise ValueError(f"cannot draw {k} of {n} points")
    return np.sort(rng.permutation(n)[:k])


def random_subset(cloud: PointCloud, k: int, seed: int) -> PointCloud:
    return take_subset(cloud, random_subset_indices(len(cloud), k, make_rng(seed)))


@dataclass(frozen=True)
class SyntheticPair:
    """Two clouds plus the ground truth needed to score a registration."""

    X: PointCloud
    Y: PointCloud
    rotation: float
    sigma: float
    correspondences: list[tuple[int, int]]
    noise: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def truth_theta(self) -> float:
        """Angle that maps the pivot-centred ``Y`` back onto ``X``."""
        return (-self.rotation) % TWO_PI


def _rotated_noisy(base: np.ndarray, theta: float, sigma: float, seed: int):
    noise = sigma * standard_normals(make_rng(seed), 2 * len(base)).reshape(-1, 2)
    return rotate_points(base, theta) + noise, noise


def sine_pair(n: int = 200, rotation: float = 2.0, sigma: float = 0.01, seed: int = 0) -> SyntheticPair:
    X = gen_sine(n)
    Yp, noise = _rotated_noisy(X.points, rotation, sigma, derive_seed(seed, 1))
    return SyntheticPair(X, PointCloud(Yp, "sine"), rotation, sigma, [(i, i) for i in range(n)], noise,
                         {"kind": "sine", "n": n})


def ellipse_pair(
    n: int = 200,
    deleted_ranges: Sequence[tuple[int, int]] = ELLIPSE_DELETIONS,
    n_outliers: int = 50,
    outlier_sigma: float = 2.0,
    rotation: float = 2.0,
    sigma: float = 0.01,
    seed: int = 0,
) -> SyntheticPair:
    """Full ellipse as ``X``; ``Y`` is the rotated, noisy, partial copy with outliers."""
    X = PointCloud(ellipse_points(n), "ellipse")
    partial = gen_ellipse_partial(n, deleted_ranges, n_outliers, outlier_sigma, derive_seed(seed, 2))
    Yp, noise = _rotated_noisy(partial.points, rotation, sigma, derive_seed(seed, 1))
    kept = kept_indices(n, deleted_ranges)
    corr = [(int(i), j) for j, i in enumerate(kept)]
    meta = {"kind": "ellipse", "n": n, "deleted_ranges": [list(r) for r in deleted_ranges],
            "n_outliers": n_outliers, "outlier_sigma": outlier_sigma}
    return SyntheticPair(X, PointCloud(Yp, "ellipse"), rotation, sigma, corr, noise, meta)


def shared_subset_pair(
    pool_size: int, cloud_size: int, k: int, sigma: float, seed: int
) -> SyntheticPair:
    """Two ``cloud_size`` subsets of one disk cloud that share exactly ``k`` points."""
    if not 0 <= k <= cloud_size <= pool_size or 2 * cloud_size - k > pool_size:
        raise ValueError(
            f"need k <= cloud_size and 2*cloud_size - k <= pool_size (got {k}, {cloud_size}, {pool_size})"
        )
    pool = gen_disk_cloud(pool_size, derive_seed(seed, 0))
    rng = make_rng(derive_seed(seed, 1))
    perm = rng.permutation(pool_size)
    shared = perm[:k]
    x_only = perm[k:cloud_size]
    y_only = perm[cloud_size:2 * cloud_size - k]
    xi = np.sort(np.concatenate((shared, x_only)))
    yi = np.sort(np.concatenate((shared, y_only)))
    rotation = float(rng.random() * TWO_PI)
    Yp, noise = _rotated_noisy(pool.points[yi], rotation, sigma, derive_seed(seed, 2))
    xpos = {int(v): a for a, v in enumerate(xi)}
    corr = sorted((xpos[int(v)], b) for b, v in enumerate(yi) if int(v) in xpos)
    return SyntheticPair(
        PointCloud(pool.points[xi], "disk"), PointCloud(Yp, "disk"), rotation, sigma, corr, noise,
        {"kind": "subset", "pool_size": pool_size, "cloud_size": cloud_size, "k": k},
    )
