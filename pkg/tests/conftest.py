import math

import numpy as np
import pytest

from cloudmatch.core import PointCloud

SIDE = 2.0 * math.sqrt(3.0)

_acceptance_lines: list[str] = []


def random_cloud(rng, n, scale=1.0):
    return PointCloud(scale * rng.random((n, 2)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def triangle():
    """Equilateral triangle of side 2*sqrt(3); the third vertex is the natural pivot."""
    return PointCloud([[0.0, 0.0], [SIDE, 0.0], [SIDE / 2.0, 3.0]], "triangle")


@pytest.fixture
def segment():
    return PointCloud([[0.0, 0.0], [SIDE, 0.0]], "segment")


@pytest.fixture
def acceptance_report():
    def report(number, ok, detail):
        _acceptance_lines.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
