"""Seeded experiment runs, aggregation and CSV export."""

from __future__ import annotations

import csv
import io
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .oracle import ErrorSample

__all__ = ["RunResult", "Aggregate", "run_single", "run_experiment", "aggregate", "steady_state_mean",
           "RAW_HEADER", "AGG_HEADER", "raw_rows", "write_raw_csv", "write_aggregate_csv",
           "raw_csv_text", "ExperimentError", "default_workers"]

log = logging.getLogger(__name__)

RAW_HEADER = ("granularity", "f_hz", "tau", "seed", "t_s", "sq_error_m2")
AGG_HEADER = ("granularity", "f_hz", "tau", "t_s", "mean_sq_error_m2", "std_sq_error_m2")


class ExperimentError(RuntimeError):
    def __init__(self, seed: int, cause: BaseException):
        super().__init__(f"run with seed {seed} failed: {cause!r}")
        self.seed = seed


@dataclass
class RunResult:
    cfg: ScenarioConfig
    seed: int
    samples: list[ErrorSample]
    events: int = 0
    wall_s: float = 0.0
    trace: list[str] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])


@dataclass
class Aggregate:
    t: np.ndarray
    mean: np.ndarray
    std: np.ndarray


def default_workers() -> int:
    raw = os.environ.get("BDISIM_WORKERS")
    if raw:
        return max(1, int(raw))
    return max(1, min(4, os.cpu_count() or 1))


def run_single(cfg: ScenarioConfig, seed: int, trace: bool = False, specs=None) -> RunResult:
    from ..sim.builder import build_simulation

    start = time.perf_counter()
    sim = build_simulation(cfg, seed, specs=specs, trace=trace)
    samples = sim.run()
    return RunResult(cfg, seed, list(samples), sim.sim.processed, time.perf_counter() - start,
                     list(sim.trace))


def _run_checked(args):
    cfg, seed = args
    try:
        return run_single(cfg, seed)
    except Exception as exc:
        raise ExperimentError(seed, exc) from exc


def aggregate(results: list[RunResult], bucket: float = 1.0) -> Aggregate:
    """Mean and population standard deviation per time bucket across runs."""
    by_bucket: dict[int, list[float]] = {}
    for r in results:
        for s in r.samples:
            by_bucket.setdefault(int(round(s.t / bucket)), []).append(s.value)
    keys = sorted(by_bucket)
    vals = [np.array(by_bucket[k]) for k in keys]
    return Aggregate(np.array(keys, dtype=float) * bucket,
                     np.array([v.mean() for v in vals]), np.array([v.std() for v in vals]))


def run_experiment(cfg: ScenarioConfig, seeds, workers: int = 1) -> tuple[list[RunResult], Aggregate]:
    """One simulation per seed; returns the runs and their per-second aggregate."""
    seeds = list(seeds)
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    jobs = [(cfg, s) for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_checked, jobs))
    else:
        results = [_run_checked(j) for j in jobs]
    return results, aggregate(results, cfg.sample_period)


def steady_state_mean(result_or_values, fraction: float = 1 / 3) -> float:
    """Mean of the last ``fraction`` of a run's samples."""
    values = result_or_values.values if isinstance(result_or_values, RunResult) else np.asarray(result_or_values)
    n = max(1, int(round(len(values) * fraction)))
    return float(values[-n:].mean())


def _fmt(x: float) -> str:
    return repr(float(x))


def raw_rows(result: RunResult, granularity: str | None = None):
    cfg = result.cfg
    g = granularity or cfg.granularity
    for s in result.samples:
        yield (g, _fmt(cfg.freq), _fmt(cfg.drift), str(result.seed), _fmt(s.t), _fmt(s.value))


def raw_csv_text(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RAW_HEADER)
    w.writerows(raw_rows(result))
    return buf.getvalue()


def write_raw_csv(path, result: RunResult) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(raw_csv_text(result))


def write_aggregate_csv(path, cells) -> int:
    """``cells`` is an iterable of ``(cfg, Aggregate)``; returns the row count."""
    rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGG_HEADER)
        for cfg, agg in cells:
            for t_s, m, sd in zip(agg.t, agg.mean, agg.std):
                w.writerow((cfg.granularity, _fmt(cfg.freq), _fmt(cfg.drift), _fmt(t_s), _fmt(m), _fmt(sd)))
                rows += 1
    return rows
