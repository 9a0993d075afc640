"""Slow reference implementations used to check the sweep pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, PointCloud
from .intervals import IntervalKind, match_interval, normalize_mod_2pi
from .registration import (
    PivotSolution,
    RegistrationResult,
    delta_report,
    energy,
    extract_correspondences,
)

MAX_ORACLE_SIZE = 20


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class GridProfile:
    thetas: np.ndarray
    energies: np.ndarray


def grid_energy(X: PointCloud, Y: PointCloud, p: int, q: int, delta: float, G: int) -> GridProfile:
    """Energy sampled at ``G`` uniformly spaced angles ``2*pi*g/G``."""
    if G < 1:
        raise ValueError(f"grid size must be >= 1, got {G}")
    thetas = TWO_PI * np.arange(G) / G
    energies = np.array([energy(X, Y, p, q, float(t), delta) for t in thetas], dtype=np.int64)
    return GridProfile(thetas, energies)


def candidate_angles(X: PointCloud, Y: PointCloud, p: int, q: int, delta: float) -> list[float]:
    """Every arc endpoint for pivots ``(p, q)`` plus the midpoints between neighbours."""
    xs = X.points - X.points[p]
    ys = Y.points - Y.points[q]
    ends = {0.0, TWO_PI}
    for i in range(len(X)):
        if i == p:
            continue
        for j in range(len(Y)):
            if j == q:
                continue
            case = match_interval(xs[i], ys[j], delta)
            if case.kind is IntervalKind.ARC:
                for lo, hi in normalize_mod_2pi(case.center, case.half_width):
                    ends.update((lo, hi))
    pts = sorted(ends)
    mids = [0.5 * (a + b) for a, b in zip(pts, pts[1:])]
    return sorted(pts + mids)


def counts_at_angles(X: PointCloud, Y: PointCloud, p: int, q: int, thetas: np.ndarray, delta: float) -> np.ndarray:
    """:func:`count_matches` evaluated at many angles at once."""
    xs = np.delete(X.points - X.points[p], p, axis=0)
    ys = np.delete(Y.points - Y.points[q], q, axis=0)
    c, s = np.cos(thetas)[:, None], np.sin(thetas)[:, None]
    rx = ys[None, :, 0] * c - ys[None, :, 1] * s
    ry = ys[None, :, 0] * s + ys[None, :, 1] * c
    d = np.hypot(xs[None, :, None, 0] - rx[:, None, :], xs[None, :, None, 1] - ry[:, None, :])
    return np.count_nonzero(d <= delta, axis=(1, 2))


def brute_force_best(X: PointCloud, Y: PointCloud, delta: float) -> RegistrationResult:
    """Exact optimum by evaluating the match count at every candidate angle.

    Same tie-break as :func:`register`: smallest ``(p, q)``, then smallest
    angle.
    """
    m, n = len(X), len(Y)
    if m > MAX_ORACLE_SIZE or n > MAX_ORACLE_SIZE:
        raise OracleSizeError(f"oracle limited to clouds of at most {MAX_ORACLE_SIZE} points")
    best = None
    for p in range(m):
        for q in range(n):
            thetas = np.array(candidate_angles(X, Y, p, q, delta))
            counts = counts_at_angles(X, Y, p, q, thetas, delta)
            g = int(np.argmax(counts))
            k_best, t_best = int(counts[g]), float(thetas[g])
            if best is None or k_best + 1 > best.k_total:
                best = PivotSolution(p, q, t_best, k_best + 1, (t_best, t_best))
    check = delta_report(X, Y, delta)
    pairs, flag = extract_correspondences(X, Y, best.p, best.q, best.theta, delta)
    return RegistrationResult(
        best=best,
        pairs=pairs,
        energy=(m - 1) * (n - 1) - (best.k_total - 1),
        delta=float(delta),
        delta_ok=check.ok,
        min_distance=check.min_distance,
        non_injective=flag,
        m=m,
        n=n,
    )


def naive_grid_search(X: PointCloud, Y: PointCloud, delta: float, G: int) -> tuple[int, int, float, int]:
    """Grid baseline over all pivots; returns ``(p, q, theta, min_energy)``."""
    best = (0, 0, 0.0, math.inf)
    for p in range(len(X)):
        for q in range(len(Y)):
            prof = grid_energy(X, Y, p, q, delta, G)
            g = int(np.argmin(prof.energies))
            if prof.energies[g] < best[3]:
                best = (p, q, float(prof.thetas[g]), int(prof.energies[g]))
    return best
