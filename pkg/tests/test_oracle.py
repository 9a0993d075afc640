import math

import numpy as np
import pytest

from cloudmatch.core import TWO_PI, PointCloud
from cloudmatch.oracle import (
    MAX_ORACLE_SIZE,
    OracleSizeError,
    brute_force_best,
    grid_energy,
    naive_grid_search,
)
from cloudmatch.registration import register

from .conftest import random_cloud


def test_grid_energy_counterexample(triangle, segment):
    prof = grid_energy(triangle, segment, 2, 0, 2.0, 4)
    assert np.allclose(prof.thetas, [0, math.pi / 2, math.pi, 1.5 * math.pi])
    assert prof.energies[3] == 0
    assert prof.energies.shape == (4,)


def test_grid_energy_single_sample(triangle, segment):
    prof = grid_energy(triangle, segment, 0, 0, 1.0, 1)
    assert prof.thetas.tolist() == [0.0]
    with pytest.raises(ValueError):
        grid_energy(triangle, segment, 0, 0, 1.0, 0)


def test_grid_never_beats_sweep(rng):
    for _ in range(5):
        X, Y = random_cloud(rng, 6), random_cloud(rng, 6)
        res = register(X, Y, 0.1)
        _, _, _, e = naive_grid_search(X, Y, 0.1, 90)
        assert e >= res.energy


def test_oracle_agrees_with_register(rng):
    for _ in range(15):
        m, n = rng.integers(2, 9, size=2)
        X, Y = random_cloud(rng, int(m)), random_cloud(rng, int(n))
        delta = float(rng.uniform(0.02, 0.3))
        a, b = register(X, Y, delta), brute_force_best(X, Y, delta)
        assert a.k_total == b.k_total
        assert a.energy == b.energy


def test_oracle_size_guard(rng):
    big = random_cloud(rng, MAX_ORACLE_SIZE + 1)
    with pytest.raises(OracleSizeError):
        brute_force_best(big, PointCloud([[0.0, 0.0]]), 0.1)


def test_oracle_identity(rng):
    X = random_cloud(rng, 8)
    res = brute_force_best(X, X, 1e-6)
    assert res.k_total == 8 and (res.best.p, res.best.q) == (0, 0)
    assert min(res.theta, TWO_PI - res.theta) < 1e-5
