"""Pivot search: for every pivot pair, sweep the feasibility arcs and keep the best.

The hot loop is vectorized over all ``q`` for a fixed ``p``.  Only point
pairs whose pivot distances differ by at most ``delta`` can produce a
non-empty arc, so candidate pairs are located with a sorted search instead
of materializing all ``(M-1)(N-1)`` cosines.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    TWO_PI,
    CloudError,
    DeltaCheck,
    MatchPair,
    PointCloud,
    check_index,
    min_pairwise_distance,
    normalize_angles,
    rotate_points,
)
from .intervals import CLAMP_EPS

log = logging.getLogger(__name__)


class StrictDeltaError(ValueError):
    """Raised when ``strict_delta`` is requested but ``delta >= Delta/2``."""

    def __init__(self, delta: float, half_min_distance: float):
        self.delta = delta
        self.half_min_distance = half_min_distance
        super().__init__(
            f"delta={delta!r} violates the injectivity bound delta < Delta/2 = {half_min_distance!r}"
        )


@dataclass(frozen=True)
class PivotSolution:
    p: int
    q: int
    theta: float
    k_total: int
    plateau: tuple[float, float]

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.plateau[0] + self.plateau[1])


@dataclass(frozen=True)
class RegistrationResult:
    best: PivotSolution
    pairs: list[MatchPair]
    energy: int
    delta: float
    delta_ok: bool
    min_distance: float
    non_injective: bool
    m: int
    n: int
    all_optima: Optional[list[PivotSolution]] = None

    @property
    def k_total(self) -> int:
        return self.best.k_total

    @property
    def theta(self) -> float:
        return self.best.theta


class Correspondences(NamedTuple):
    pairs: list[MatchPair]
    non_injective: bool


# ---------------------------------------------------------------------------
# direct evaluation (independent of the arc machinery)


def _pair_distances(X: PointCloud, Y: PointCloud, p: int, q: int, theta: float) -> np.ndarray:
    check_index(p, len(X), "pivot p")
    check_index(q, len(Y), "pivot q")
    xs = np.delete(X.points - X.points[p], p, axis=0)
    ys = rotate_points(np.delete(Y.points - Y.points[q], q, axis=0), theta)
    return np.hypot(xs[:, None, 0] - ys[None, :, 0], xs[:, None, 1] - ys[None, :, 1])


def count_matches(X: PointCloud, Y: PointCloud, p: int, q: int, theta: float, delta: float) -> int:
    """Non-pivot pairs within ``delta`` after aligning pivots and rotating ``Y``."""
    _check_delta(delta)
    return int(np.count_nonzero(_pair_distances(X, Y, p, q, theta) <= delta))


def energy(X: PointCloud, Y: PointCloud, p: int, q: int, theta: float, delta: float) -> int:
    """Step-potential energy: non-pivot pairs farther apart than ``delta``."""
    _check_delta(delta)
    return int(np.count_nonzero(_pair_distances(X, Y, p, q, theta) > delta))


def extract_correspondences(
    X: PointCloud, Y: PointCloud, p: int, q: int, theta: float, delta: float
) -> Correspondences:
    """Matched pairs at a configuration, pivot pair first.

    If some point is within ``delta`` of several partners the raw set is
    thinned greedily by ascending distance and ``non_injective`` is set.
    """
    d = _pair_distances(X, Y, p, q, theta)
    ii, jj = np.nonzero(d <= delta)
    # map back from the pivot-deleted layout
    ii = ii + (ii >= p)
    jj = jj + (jj >= q)
    dist = d[np.nonzero(d <= delta)]
    raw = sorted(zip(dist.tolist(), ii.tolist(), jj.tolist()))
    injective = len(set(ii.tolist())) == len(ii) and len(set(jj.tolist())) == len(jj)
    used_i, used_j = {p}, {q}
    kept = []
    for dd, i, j in raw:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        kept.append(MatchPair(i, j, dd))
    kept.sort(key=lambda m: (m.i, m.j))
    return Correspondences([MatchPair(p, q, 0.0)] + kept, not injective)


def _check_delta(delta: float) -> None:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")


# ---------------------------------------------------------------------------
# vectorized per-row solver


class _PivotTables:
    """Pivot-relative distances and polar angles for both clouds."""

    def __init__(self, X: PointCloud, Y: PointCloud, delta: float):
        _check_delta(delta)
        self.delta = float(delta)
        self.m, self.n = len(X), len(Y)
        self.dx, self.ax = _relative_polar(X.points)
        self.dy, self.ay = _relative_polar(Y.points)
        self.order_y = np.argsort(self.dy, axis=1, kind="stable")
        dys = np.take_along_axis(self.dy, self.order_y, axis=1)
        self.offset = 2.0 * (float(dys[:, -1].max()) + self.delta) + 1.0
        rows = np.arange(self.n, dtype=np.float64)[:, None] * self.offset
        self.flat_sorted = (dys + rows).ravel()
        self.order_flat = self.order_y.ravel()
        # absorbs rounding from adding the row offsets; exact test comes later
        self.slack = 1e-9 + 8.0 * np.finfo(float).eps * self.offset * self.n

    def solve_row(self, p: int, qs: Optional[np.ndarray] = None):
        """Return ``(k_total, theta, plateau_end)`` arrays for pivot ``p`` over ``qs``."""
        n, delta = self.n, self.delta
        if qs is None:
            qs = np.arange(n)
        qs = np.asarray(qs, dtype=np.int64)
        nq = len(qs)
        k_total = np.ones(nq, dtype=np.int64)
        theta = np.zeros(nq)
        plateau_end = np.full(nq, TWO_PI)
        if self.m == 1 or n == 1:
            return k_total, theta, plateau_end

        a = np.delete(self.dx[p], p)
        a_ang = np.delete(self.ax[p], p)
        base = (qs.astype(np.float64) * self.offset)[:, None]
        lo = np.searchsorted(self.flat_sorted, base + (a - delta - self.slack)[None, :], side="left")
        hi = np.searchsorted(self.flat_sorted, base + (a + delta + self.slack)[None, :], side="right")
        cnt = (hi - lo).ravel()
        total = int(cnt.sum())
        if total == 0:
            return k_total, theta, plateau_end

        gq = np.repeat(np.repeat(np.arange(nq), len(a)), cnt)
        gi = np.repeat(np.tile(np.arange(len(a)), nq), cnt)
        first = np.repeat(lo.ravel(), cnt)
        within = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        j = self.order_flat[first + within]
        q = qs[gq]
        keep = j != q
        gq, gi, j, q = gq[keep], gi[keep], j[keep], q[keep]

        ai = a[gi]
        bj = self.dy[q, j]
        c = (ai * ai + bj * bj - delta * delta) / (2.0 * ai * bj)
        c = np.where((c > 1.0) & (c <= 1.0 + CLAMP_EPS), 1.0, c)
        c = np.where((c < -1.0) & (c >= -1.0 - CLAMP_EPS), -1.0, c)
        full = c < -1.0
        arc = (c >= -1.0) & (c <= 1.0)
        n_full = np.bincount(gq[full], minlength=nq)

        gq, ai_ang, c, q, j = gq[arc], a_ang[gi[arc]], c[arc], q[arc], j[arc]
        alpha = np.arccos(c)
        center = normalize_angles(ai_ang - self.ay[q, j])
        start = normalize_angles(center - alpha)
        end = normalize_angles(center + alpha)
        whole = 2.0 * alpha >= TWO_PI
        start = np.where(whole, 0.0, start)
        end = np.where(whole, TWO_PI, end)
        wrap = (~whole) & (start > end)
        # wrapped arcs become [0, end] and [start, 2pi]
        ev_g = np.concatenate((gq, gq, gq[wrap], gq[wrap]))
        ev_ang = np.concatenate((np.where(wrap, 0.0, start), end, start[wrap], np.full(int(wrap.sum()), TWO_PI)))
        ev_kind = np.concatenate(
            (np.ones(len(gq), np.int64), -np.ones(len(gq), np.int64),
             np.ones(int(wrap.sum()), np.int64), -np.ones(int(wrap.sum()), np.int64))
        )
        overlap, th, pe = _grouped_sweep(ev_g, ev_ang, ev_kind, nq)
        k_total += overlap + n_full
        hit = overlap > 0
        theta[hit] = th[hit]
        plateau_end[hit] = pe[hit]
        return k_total, theta, plateau_end


def _relative_polar(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dx = pts[None, :, 0] - pts[:, None, 0]
    dy = pts[None, :, 1] - pts[:, None, 1]
    return np.hypot(dx, dy), np.arctan2(dy, dx)


def _grouped_sweep(group: np.ndarray, angle: np.ndarray, kind: np.ndarray, ngroups: int):
    """Endpoint sweep run independently for each group id in ``[0, ngroups)``."""
    overlap = np.zeros(ngroups, dtype=np.int64)
    theta = np.zeros(ngroups)
    pend = np.full(ngroups, TWO_PI)
    if len(group) == 0:
        return overlap, theta, pend
    order = np.lexsort((kind, angle, group))
    g, ang, running = group[order], angle[order], np.cumsum(kind[order])
    # every group sums to zero, so the global running sum restarts per group
    starts = np.flatnonzero(np.r_[True, g[1:] != g[:-1]])
    gmax = np.maximum.reduceat(running, starts)
    gids = g[starts]
    sizes = np.diff(np.r_[starts, len(g)])
    at_max = np.flatnonzero(running == np.repeat(gmax, sizes))
    # first index reaching the group maximum
    _, first = np.unique(g[at_max], return_index=True)
    idx = at_max[first]
    pos = gmax > 0
    overlap[gids[pos]] = gmax[pos]
    theta[gids[pos]] = ang[idx[pos]]
    pend[gids[pos]] = ang[idx[pos] + 1]
    return overlap, theta, pend


# ---------------------------------------------------------------------------
# public entry points


def solve_pivot(X: PointCloud, Y: PointCloud, p: int, q: int, delta: float) -> PivotSolution:
    """Best rotation for the fixed pivot pair ``(p, q)``."""
    check_index(p, len(X), "pivot p")
    check_index(q, len(Y), "pivot q")
    k, th, pe = _PivotTables(X, Y, delta).solve_row(p, np.array([q]))
    return PivotSolution(p, q, float(th[0]), int(k[0]), (float(th[0]), float(pe[0])))


def delta_report(X: PointCloud, Y: PointCloud, delta: float) -> DeltaCheck:
    """Like :func:`validate_delta` but tolerant of singleton clouds."""
    _check_delta(delta)
    mins = [min_pairwise_distance(c) for c in (X, Y) if len(c) >= 2]
    dmin = min(mins) if mins else math.inf
    return DeltaCheck(dmin, delta, delta < dmin / 2.0)


def default_workers() -> int:
    return os.cpu_count() or 1


def pivot_table(X: PointCloud, Y: PointCloud, delta: float, workers: int = 1):
    """``(k_total, theta, plateau_end)`` as ``(M, N)`` arrays over all pivot pairs."""
    tables = _PivotTables(X, Y, delta)
    rows = range(len(X))
    if workers > 1 and len(X) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(tables.solve_row, rows))
    else:
        out = [tables.solve_row(p) for p in rows]
    k = np.stack([o[0] for o in out])
    th = np.stack([o[1] for o in out])
    pe = np.stack([o[2] for o in out])
    return k, th, pe


def register(
    X: PointCloud,
    Y: PointCloud,
    delta: float,
    *,
    strict_delta: bool = False,
    all_solutions: bool = False,
    workers: int = 1,
) -> RegistrationResult:
    """Find the rigid motion that matches the largest common subset of ``X`` and ``Y``.

    The returned angle rotates the pivot-centred ``Y`` onto ``X``.  Ties in
    ``k_total`` go to the smallest ``(p, q)``.  Correspondences are read off
    at the middle of the winning plateau, where the count is exact.
    """
    if len(X) == 0 or len(Y) == 0:
        raise CloudError("clouds must be nonempty")
    check = delta_report(X, Y, delta)
    if not check.ok:
        if strict_delta:
            raise StrictDeltaError(delta, check.half_min_distance)
        log.warning(
            "delta=%g is not below Delta/2=%g; matches may be non-injective",
            delta, check.half_min_distance,
        )
    k, th, pe = pivot_table(X, Y, delta, workers=workers)
    best_k = int(k.max())
    # argmax over the row-major table gives the lexicographically smallest (p, q)
    p, q = divmod(int(np.argmax(k)), k.shape[1])
    best = PivotSolution(p, q, float(th[p, q]), best_k, (float(th[p, q]), float(pe[p, q])))
    pairs, non_injective = extract_correspondences(X, Y, p, q, best.midpoint, delta)
    optima = None
    if all_solutions:
        optima = [
            PivotSolution(int(a), int(b), float(th[a, b]), best_k, (float(th[a, b]), float(pe[a, b])))
            for a, b in zip(*np.nonzero(k == best_k))
        ]
    m, n = len(X), len(Y)
    return RegistrationResult(
        best=best,
        pairs=pairs,
        energy=(m - 1) * (n - 1) - (best_k - 1),
        delta=float(delta),
        delta_ok=check.ok,
        min_distance=check.min_distance,
        non_injective=non_injective,
        m=m,
        n=n,
        all_optima=optima,
    )
