"""Library classification and common-subset-size sweeps on random disk clouds."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import TWO_PI, PointCloud
from .registration import PivotSolution, register
from .synth import (
    SyntheticPair,
    add_gaussian_noise,
    derive_seed,
    gen_disk_cloud,
    make_rng,
    random_subset_indices,
    rotate_cloud,
    shared_subset_pair,
    take_subset,
)

DEFAULT_K_VALUES = (10, 20, 30, 40, 50, 70, 80, 100, 150)
SUCCESS_DEG = 1.0


def circular_angle_error_deg(found: float, truth: float) -> float:
    d = (found - truth) % TWO_PI
    return math.degrees(min(d, TWO_PI - d))


def classify(
    library: Sequence[PointCloud], query: PointCloud, delta: float, workers: int = 1
) -> tuple[int, PivotSolution]:
    """Index of the library cloud sharing the most matches with ``query`` (first wins ties)."""
    if not library:
        raise ValueError("library must contain at least one cloud")
    best_idx, best = -1, None
    for idx, cloud in enumerate(library):
        sol = register(cloud, query, delta, workers=workers).best
        if best is None or sol.k_total > best.k_total:
            best_idx, best = idx, sol
    return best_idx, best


def _summary(values: list[float]) -> dict:
    if not values:
        return {"mean": None, "std": None, "max": None}
    a = np.asarray(values)
    return {"mean": float(a.mean()), "std": float(a.std()), "max": float(a.max())}


def _run_trials(fn: Callable[[int], dict], n: int, workers: int) -> list[dict]:
    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(n)))
    return [fn(t) for t in range(n)]


@dataclass
class ClassificationParams:
    n_clouds: int = 50
    cloud_size: int = 150
    subset_range: tuple[int, int] = (75, 150)
    sigma: float = 0.01
    delta: float = 0.01
    trials: int = 50
    seed: int = 0

    def check(self) -> None:
        lo, hi = self.subset_range
        if self.n_clouds < 1 or self.cloud_size < 1 or self.trials < 0:
            raise ValueError("n_clouds and cloud_size must be positive, trials nonnegative")
        if not 1 <= lo <= hi <= self.cloud_size:
            raise ValueError(f"subset range {self.subset_range} must lie in [1, {self.cloud_size}]")
        if self.sigma < 0 or not self.delta > 0:
            raise ValueError("sigma must be nonnegative and delta positive")


@dataclass
class ClassificationReport:
    params: dict
    trials: int
    accuracy: Optional[float]
    angle_errors_deg: list[float]
    mean_error_deg: Optional[float]
    std_error_deg: Optional[float]
    max_error_deg: Optional[float]
    records: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def run_classification_experiment(params: ClassificationParams, workers: int = 1) -> ClassificationReport:
    """Match rotated noisy subsets back to the disk-cloud library they came from.

    Only the query is perturbed; library clouds stay exact.  Angle errors are
    collected on correctly classified trials only.
    """
    params.check()
    library = [
        gen_disk_cloud(params.cloud_size, derive_seed(params.seed, 0, c)).with_label(f"cloud{c}")
        for c in range(params.n_clouds)
    ] if params.trials else []

    def trial(t: int) -> dict:
        rng = make_rng(derive_seed(params.seed, 1, t))
        src = int(rng.integers(params.n_clouds))
        size = int(rng.integers(params.subset_range[0], params.subset_range[1] + 1))
        rotation = float(rng.random() * TWO_PI)
        idx = random_subset_indices(params.cloud_size, size, rng)
        query = rotate_cloud(take_subset(library[src], idx), rotation)
        query = add_gaussian_noise(query, params.sigma, derive_seed(params.seed, 2, t))
        pred, sol = classify(library, query, params.delta)
        err = circular_angle_error_deg(sol.theta, (-rotation) % TWO_PI)
        return {"trial": t, "source": src, "predicted": pred, "subset_size": size,
                "rotation": rotation, "theta": sol.theta, "k_total": sol.k_total,
                "correct": pred == src, "angle_error_deg": err}

    records = _run_trials(trial, params.trials, workers)
    errors = [r["angle_error_deg"] for r in records if r["correct"]]
    s = _summary(errors)
    acc = sum(r["correct"] for r in records) / len(records) if records else None
    return ClassificationReport(asdict(params), len(records), acc, errors, s["mean"], s["std"], s["max"], records)


@dataclass
class SubsetParams:
    pool_size: int = 300
    cloud_size: int = 150
    k_values: tuple[int, ...] = DEFAULT_K_VALUES
    trials_per_k: int = 20
    sigma: float = 0.01
    delta: float = 0.01
    seed: int = 0

    def check(self) -> None:
        if self.trials_per_k < 0:
            raise ValueError("trials_per_k must be nonnegative")
        for k in self.k_values:
            if not 0 < k <= self.cloud_size <= self.pool_size or 2 * self.cloud_size - k > self.pool_size:
                raise ValueError(
                    f"k={k} inconsistent with cloud_size={self.cloud_size}, pool_size={self.pool_size}"
                    " (need 2*cloud_size - k <= pool_size)"
                )
        if self.sigma < 0 or not self.delta > 0:
            raise ValueError("sigma must be nonnegative and delta positive")


@dataclass
class SubsetSweepReport:
    params: dict
    k_values: list[int]
    success_rate: list[Optional[float]]
    trials_per_k: int
    records: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def pivot_lower_bound(pair: SyntheticPair, delta: float) -> int:
    """Guaranteed ``k_total`` from the generator's ground truth.

    Pivoting on a true correspondence ``(i, j)`` at the true angle leaves
    every other true pair displaced by exactly the difference of their
    noise vectors, so those within ``delta`` are matched.
    """
    js = np.array([j for _, j in pair.correspondences], dtype=np.int64)
    if js.size == 0:
        return 1
    nz = pair.noise[js]
    d = np.hypot(nz[:, None, 0] - nz[None, :, 0], nz[:, None, 1] - nz[None, :, 1])
    return int((d <= delta).sum(axis=1).max())


def run_subset_experiment(params: SubsetParams, workers: int = 1) -> SubsetSweepReport:
    """Registration success rate as a function of the number of shared points."""
    params.check()
    jobs = [(k, t) for k in params.k_values for t in range(params.trials_per_k)]

    def trial(n: int) -> dict:
        k, t = jobs[n]
        pair = shared_subset_pair(params.pool_size, params.cloud_size, k, params.sigma,
                                  derive_seed(params.seed, k, t))
        res = register(pair.X, pair.Y, params.delta)
        err = circular_angle_error_deg(res.theta, pair.truth_theta)
        return {"k": k, "trial": t, "rotation": pair.rotation, "theta": res.theta,
                "k_total": res.k_total, "angle_error_deg": err, "success": err < SUCCESS_DEG,
                "lower_bound": pivot_lower_bound(pair, params.delta)}

    records = _run_trials(trial, len(jobs), workers)
    rates = []
    for k in params.k_values:
        hits = [r["success"] for r in records if r["k"] == k]
        rates.append(sum(hits) / len(hits) if hits else None)
    return SubsetSweepReport(asdict(params), list(params.k_values), rates, params.trials_per_k, records)
