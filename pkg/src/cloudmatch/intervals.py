"""Angular feasibility sets for a single point pair and the endpoint sweep.

For two points ``x`` and ``y`` (both already expressed relative to their
pivots) the set of rotations bringing ``R(theta) y`` within ``delta`` of ``x``
is either empty, the whole circle, or a closed arc centred on
``angle(x) - angle(y)`` whose half-width follows from the law of cosines.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import TWO_PI, normalize_angle

# |cos| values this close past +-1 are treated as exactly +-1
CLAMP_EPS = 1e-12


class PivotLeakError(ValueError):
    """A point at the origin (i.e. a pivot) was passed to :func:`match_interval`."""


class IntervalKind(enum.Enum):
    EMPTY = "empty"
    FULL = "full"
    ARC = "arc"


@dataclass(frozen=True)
class AngleIntervalCase:
    kind: IntervalKind
    center: Optional[float] = None
    half_width: Optional[float] = None

    @classmethod
    def empty(cls) -> "AngleIntervalCase":
        return cls(IntervalKind.EMPTY)

    @classmethod
    def full(cls) -> "AngleIntervalCase":
        return cls(IntervalKind.FULL)

    @classmethod
    def arc(cls, center: float, half_width: float) -> "AngleIntervalCase":
        if not 0.0 <= half_width <= math.pi:
            raise ValueError(f"half_width must lie in [0, pi], got {half_width}")
        return cls(IntervalKind.ARC, center, half_width)


START = 1
END = -1


@dataclass(frozen=True, order=True)
class AngleEvent:
    # field order gives the (angle, kind) sort with ends before starts on ties
    angle: float
    kind: int


@dataclass(frozen=True)
class SweepOutcome:
    theta: float
    plateau_end: float
    arc_overlap: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.theta + self.plateau_end)


def clamp_cosine(c: float) -> float:
    if 1.0 < c <= 1.0 + CLAMP_EPS:
        return 1.0
    if -1.0 - CLAMP_EPS <= c < -1.0:
        return -1.0
    return c


def match_interval(x: Sequence[float], y: Sequence[float], delta: float) -> AngleIntervalCase:
    """Rotations ``theta`` with ``||x - R(theta) y|| <= delta``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    nx = math.hypot(x[0], x[1])
    ny = math.hypot(y[0], y[1])
    if nx == 0.0 or ny == 0.0:
        raise PivotLeakError("pivot point reached match_interval; pivots must be excluded")
    c = clamp_cosine((nx * nx + ny * ny - delta * delta) / (2.0 * nx * ny))
    if c > 1.0:
        return AngleIntervalCase.empty()
    if c < -1.0:
        return AngleIntervalCase.full()
    center = normalize_angle(math.atan2(x[1], x[0]) - math.atan2(y[1], y[0]))
    return AngleIntervalCase.arc(center, math.acos(c))


def normalize_mod_2pi(center: float, half_width: float) -> list[tuple[float, float]]:
    """Split the arc ``[center - hw, center + hw]`` into pieces inside ``[0, 2*pi]``."""
    if 2.0 * half_width >= TWO_PI:
        return [(0.0, TWO_PI)]
    start = normalize_angle(center - half_width)
    end = normalize_angle(center + half_width)
    if start <= end:
        return [(start, end)]
    return [(0.0, end), (start, TWO_PI)]


def arc_events(intervals: Iterable[tuple[float, float]]) -> list[AngleEvent]:
    events = []
    for lo, hi in intervals:
        if not (0.0 <= lo <= hi <= TWO_PI):
            raise ValueError(f"interval ({lo}, {hi}) is not a normalized piece of [0, 2pi]")
        events.append(AngleEvent(lo, START))
        events.append(AngleEvent(hi, END))
    events.sort()
    return events


def sweep_max_overlap(intervals: Iterable[tuple[float, float]]) -> SweepOutcome:
    """Find the angle covered by the most intervals.

    Events are processed in ``(angle, kind)`` order so that intervals closing
    at an angle are removed before those opening there are added.  The first
    (smallest-angle) maximizing plateau wins.
    """
    events = arc_events(intervals)
    best, best_k = 0, -1
    running = 0
    for k, ev in enumerate(events):
        running += ev.kind
        if running > best:
            best, best_k = running, k
    if best_k < 0:
        return SweepOutcome(0.0, TWO_PI, 0)
    return SweepOutcome(events[best_k].angle, events[best_k + 1].angle, best)


def coverage_at(intervals: Iterable[tuple[float, float]], theta: float) -> int:
    """Number of closed intervals containing ``theta`` (no tie rule)."""
    return sum(1 for lo, hi in intervals if lo <= theta <= hi)
