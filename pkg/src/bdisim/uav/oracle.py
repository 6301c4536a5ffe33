"""Ideal formation positions and the squared-distance error metric."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import ScenarioConfig

Point = tuple[float, float]


def distance(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])

__all__ = ["ErrorSample", "slot_points", "oracle_ideal_positions", "formation_error"]


@dataclass(frozen=True)
class ErrorSample:
    t: float
    value: float


def slot_points(leader_pos: Point, cfg: ScenarioConfig) -> list[Point]:
    n = cfg.n_followers
    lx, ly = leader_pos
    return [(lx + cfg.formation_radius * math.cos(2 * math.pi * k / n),
             ly + cfg.formation_radius * math.sin(2 * math.pi * k / n)) for k in range(n)]


def oracle_ideal_positions(leader_pos: Point, assignment: Mapping[str, int], cfg: ScenarioConfig,
                           positions: Mapping[str, Point] | None = None) -> dict[str, Point]:
    """Ideal point of every follower.

    Assigned followers sit on their slot. With ``positions`` given, each
    unassigned follower is mapped to the nearest slot nobody has claimed;
    under ``slot_matching="optimal"`` every follower is instead matched to
    a slot so that the total squared error is minimal.
    """
    slots = slot_points(leader_pos, cfg)
    if positions is not None and cfg.slot_matching == "optimal" and positions:
        names = sorted(positions)
        cost = np.array([[distance(positions[u], p) ** 2 for p in slots] for u in names])
        rows, cols = linear_sum_assignment(cost)
        return {names[r]: slots[c] for r, c in zip(rows, cols)}
    ideal = {u: slots[k] for u, k in assignment.items()}
    if positions is not None:
        free = [p for k, p in enumerate(slots) if k not in set(assignment.values())]
        for u in sorted(positions):
            if u in ideal:
                continue
            if free:
                ideal[u] = min(free, key=lambda p: distance(positions[u], p))
            else:
                ideal[u] = min(slots, key=lambda p: distance(positions[u], p))
    return ideal


def formation_error(leader_pos: Point, positions: Mapping[str, Point], assignment: Mapping[str, int],
                    cfg: ScenarioConfig) -> float:
    """Sum over followers of the squared distance to their ideal position."""
    ideal = oracle_ideal_positions(leader_pos, assignment, cfg, positions)
    return float(sum(distance(positions[u], ideal[u]) ** 2 for u in positions))
