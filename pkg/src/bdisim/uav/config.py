"""Scenario parameters for the leader/follower formation experiment."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

__all__ = ["ScenarioConfig", "ConfigError", "GRANULARITIES", "DRIFT_READINGS", "SLOT_MATCHINGS"]

GRANULARITIES = ("ama", "acli", "aclp")
DRIFT_READINGS = ("frequency", "interval")
SLOT_MATCHINGS = ("join_order", "optimal")


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ScenarioConfig:
    leader_radius: float = 5.0       # r_l, m
    formation_radius: float = 2.5    # r_f, m
    comm_range: float = 5.0          # r_c, m
    max_speed: float = 1.0           # m/s
    leader_period: float = 600.0     # s per leader lap
    n_followers: int = 16
    arena_radius: float = 10.0       # m
    freq: float = 1.0                # control-loop frequency f, Hz
    drift: float = 0.0               # tau, relative sd of the frequency
    duration: float = 1500.0         # simulated seconds
    repetitions: int = 100
    granularity: str = "aclp"
    drift_reading: str = "frequency"
    slot_matching: str = "join_order"
    sample_period: float = 1.0
    stale_cycles: float = 3.0        # leader is lost after stale_cycles / f without an invite

    def __post_init__(self):
        errors = self.problems()
        if errors:
            raise ConfigError(errors)

    def problems(self) -> list[str]:
        errs = []
        for name in ("leader_radius", "formation_radius", "comm_range", "max_speed", "leader_period",
                     "arena_radius", "freq", "duration", "sample_period", "stale_cycles"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) and v > 0):
                errs.append(f"{name} must be a positive number, got {v!r}")
        if not (isinstance(self.drift, (int, float)) and math.isfinite(self.drift) and self.drift >= 0):
            errs.append(f"drift must be >= 0, got {self.drift!r}")
        for name in ("n_followers", "repetitions"):
            v = getattr(self, name)
            if not (isinstance(v, int) and not isinstance(v, bool) and v >= 0):
                errs.append(f"{name} must be a non-negative integer, got {v!r}")
        if self.granularity not in GRANULARITIES:
            errs.append(f"granularity must be one of {', '.join(GRANULARITIES)}, got {self.granularity!r}")
        if self.drift_reading not in DRIFT_READINGS:
            errs.append(f"drift_reading must be one of {', '.join(DRIFT_READINGS)}, got {self.drift_reading!r}")
        if self.slot_matching not in SLOT_MATCHINGS:
            errs.append(f"slot_matching must be one of {', '.join(SLOT_MATCHINGS)}, got {self.slot_matching!r}")
        return errs

    @property
    def angular_speed(self) -> float:
        return 2 * math.pi / self.leader_period

    @property
    def stale_after(self) -> float:
        return self.stale_cycles / self.freq

    def mode(self):
        from ..sim.scheduler import granularity_mode
        return granularity_mode(self.granularity, self.freq, self.drift, self.drift_reading)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]
