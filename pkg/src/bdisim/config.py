"""YAML configuration: sections ``scenario``, ``execution``, ``sweep``, ``output``.

Keys mirror :class:`~bdisim.uav.config.ScenarioConfig`, :class:`~bdisim.live.LiveConfig`
and the sweep grid. Unknown sections or keys are errors, and every problem
is reported at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .uav.config import GRANULARITIES, ConfigError, ScenarioConfig

__all__ = ["RunManifest", "SweepGrid", "FileConfig", "load_config", "parse_config"]

SCENARIO_KEYS = ("leader_radius", "formation_radius", "comm_range", "max_speed", "leader_period",
                 "n_followers", "arena_radius", "duration")
EXECUTION_KEYS = ("granularity", "freq", "drift", "drift_reading", "slot_matching", "sample_period",
                  "stale_cycles", "seed", "tick_ms", "cycle_hint")
SWEEP_KEYS = ("granularities", "freqs", "drifts", "repetitions", "base_seed")
OUTPUT_KEYS = ("directory",)
SECTIONS = {"scenario": SCENARIO_KEYS, "execution": EXECUTION_KEYS, "sweep": SWEEP_KEYS,
            "output": OUTPUT_KEYS}


@dataclass(frozen=True)
class SweepGrid:
    granularities: tuple = GRANULARITIES
    freqs: tuple = (1.0, 2.0)
    drifts: tuple = (0.0, 0.5, 0.7)
    repetitions: int = 100
    base_seed: int = 0

    @property
    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.repetitions)]

    def cells(self):
        for g in self.granularities:
            for f in self.freqs:
                for d in self.drifts:
                    yield g, float(f), float(d)


@dataclass(frozen=True)
class FileConfig:
    scenario: ScenarioConfig
    sweep: SweepGrid
    seed: int = 0
    tick_ms: float = 50.0
    cycle_hint: float | None = None
    output_dir: str = "results"


@dataclass(frozen=True)
class RunManifest:
    """One resolved command: what to run and where to write it."""

    config_path: str
    mode: str  # "sim", "sweep" or "live"
    granularity: str
    freq: float
    drift: float
    seeds: tuple
    out: str
    extra: dict = field(default_factory=dict)


def _seed_ok(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < 2**64


def parse_config(doc) -> FileConfig:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(["configuration must be a mapping of sections"])
    errors = []
    for section, body in doc.items():
        if section not in SECTIONS:
            errors.append(f"unknown section {section!r} (expected {', '.join(SECTIONS)})")
            continue
        if body is None:
            continue
        if not isinstance(body, dict):
            errors.append(f"section {section!r} must be a mapping")
            continue
        for key in body:
            if key not in SECTIONS[section]:
                errors.append(f"unknown key {section}.{key}")

    def known(section):
        body = doc.get(section)
        if not isinstance(body, dict):
            return {}
        return {k: v for k, v in body.items() if k in SECTIONS[section]}

    scen, execu, sweep, out = known("scenario"), known("execution"), known("sweep"), known("output")
    if isinstance(execu.get("granularity"), str):
        execu["granularity"] = execu["granularity"].lower()

    seed = execu.pop("seed", 0)
    tick_ms = execu.pop("tick_ms", 50.0)
    cycle_hint = execu.pop("cycle_hint", None)
    if not _seed_ok(seed):
        errors.append(f"execution.seed must be an unsigned 64-bit integer, got {seed!r}")
    if not (isinstance(tick_ms, (int, float)) and tick_ms > 0):
        errors.append(f"execution.tick_ms must be positive, got {tick_ms!r}")
    if cycle_hint is not None and not (isinstance(cycle_hint, (int, float)) and cycle_hint > 0):
        errors.append(f"execution.cycle_hint must be positive or null, got {cycle_hint!r}")

    if "repetitions" in sweep:
        scen["repetitions"] = sweep["repetitions"]
    for key in ("freq", "drift"):
        if isinstance(execu.get(key), int) and not isinstance(execu.get(key), bool):
            execu[key] = float(execu[key])
    scenario = None
    try:
        scenario = ScenarioConfig(**scen, **execu)
    except ConfigError as exc:
        errors.extend(exc.errors)
    except TypeError as exc:
        errors.append(str(exc))

    grid = None
    try:
        grid = _parse_sweep(sweep)
    except ConfigError as exc:
        errors.extend(exc.errors)
    if errors:
        raise ConfigError(errors)
    return FileConfig(scenario, grid, seed, float(tick_ms), cycle_hint, str(out.get("directory", "results")))


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _parse_sweep(sweep: dict) -> SweepGrid:
    errors = []
    kw = {}
    if "granularities" in sweep:
        gs = [str(g).lower() for g in _as_list(sweep["granularities"])]
        bad = [g for g in gs if g not in GRANULARITIES]
        if bad:
            errors.append(f"sweep.granularities: unknown {bad}")
        kw["granularities"] = tuple(gs)
    for key in ("freqs", "drifts"):
        if key in sweep:
            vals = _as_list(sweep[key])
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                errors.append(f"sweep.{key} must be numbers, got {vals!r}")
            elif key == "freqs" and not all(v > 0 for v in vals):
                errors.append("sweep.freqs must be positive")
            elif key == "drifts" and not all(v >= 0 for v in vals):
                errors.append("sweep.drifts must be >= 0")
            else:
                kw[key] = tuple(float(v) for v in vals)
    if "repetitions" in sweep:
        r = sweep["repetitions"]
        if not (isinstance(r, int) and not isinstance(r, bool) and r > 0):
            errors.append(f"sweep.repetitions must be a positive integer, got {r!r}")
        else:
            kw["repetitions"] = r
    if "base_seed" in sweep:
        if not _seed_ok(sweep["base_seed"]):
            errors.append(f"sweep.base_seed must be an unsigned 64-bit integer, got {sweep['base_seed']!r}")
        else:
            kw["base_seed"] = sweep["base_seed"]
    if errors:
        raise ConfigError(errors)
    return SweepGrid(**kw)


def load_config(path) -> FileConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path} is not valid YAML: {exc}"]) from exc
    return parse_config(doc)
