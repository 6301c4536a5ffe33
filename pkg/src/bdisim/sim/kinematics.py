"""Exact straight-line movement, evaluated lazily as a function of time."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Point", "MovementState", "position_at", "arrival_time", "distance"]

Point = tuple[float, float]


def distance(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


@dataclass(frozen=True)
class MovementState:
    origin: Point
    target: Point
    depart: float
    speed: float

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError(f"speed must be positive, got {self.speed}")


def arrival_time(m: MovementState) -> float:
    return m.depart + distance(m.origin, m.target) / m.speed


def position_at(m: MovementState, t: float) -> Point:
    """Position along the segment at time ``t``, clamped at the target."""
    if t < m.depart:
        raise ValueError(f"query time {t} precedes departure {m.depart}")
    length = distance(m.origin, m.target)
    travelled = m.speed * (t - m.depart)
    if travelled >= length:
        return m.target
    f = travelled / length
    return (m.origin[0] + (m.target[0] - m.origin[0]) * f,
            m.origin[1] + (m.target[1] - m.origin[1]) * f)
