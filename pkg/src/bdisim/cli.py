"""Command-line front end: ``bdisim run|sweep|live``.

Exit codes: 0 success, 1 run failure, 2 invalid configuration or usage,
130 interrupted.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

from .config import FileConfig, RunManifest, SweepGrid, load_config
from .uav.config import GRANULARITIES, ConfigError, ScenarioConfig
from .uav.experiment import (
    RAW_HEADER, RunResult, aggregate, default_workers, raw_csv_text, run_single, steady_state_mean,
    write_aggregate_csv,
)
from .uav.oracle import ErrorSample

log = logging.getLogger("bdisim")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERRUPTED = 0, 1, 2, 130


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _granularities(text: str) -> list[str]:
    out = [g.strip().lower() for g in text.split(",") if g.strip()]
    for g in out:
        if g not in GRANULARITIES:
            raise argparse.ArgumentTypeError(f"unknown granularity {g!r}")
    return out


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdisim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="one simulation, one CSV")
    r.add_argument("--config", required=True)
    r.add_argument("--granularity", choices=GRANULARITIES, type=str.lower)
    r.add_argument("--seed", type=_seed)
    r.add_argument("--freq", type=float)
    r.add_argument("--drift", type=float)
    r.add_argument("--out", required=True)
    r.add_argument("--trace", help="also write the ordered event trace here")

    s = sub.add_parser("sweep", help="Cartesian grid of runs plus an aggregate CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--granularities", type=_granularities)
    s.add_argument("--freqs", type=_floats)
    s.add_argument("--drifts", type=_floats)
    s.add_argument("--repetitions", type=int)
    s.add_argument("--base-seed", type=_seed)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--resume", action="store_true", help="reuse raw CSVs already on disk")
    s.add_argument("--max-runs", type=int, help="stop after this many new runs (checkpoint)")

    lv = sub.add_parser("live", help="run the agents as threads against wall-clock time")
    lv.add_argument("--config", required=True)
    lv.add_argument("--duration", type=float, required=True)
    lv.add_argument("--freq", type=float, help="cycle frequency cap in Hz (default: unconstrained)")
    lv.add_argument("--seed", type=_seed)
    lv.add_argument("--tick-ms", type=float)
    lv.add_argument("--out", required=True)
    return p


def _scenario_for(fc: FileConfig, granularity=None, freq=None, drift=None) -> ScenarioConfig:
    changes = {k: v for k, v in (("granularity", granularity), ("freq", freq), ("drift", drift))
               if v is not None}
    return fc.scenario.with_(**changes)


def cmd_run(args) -> int:
    fc = load_config(args.config)
    cfg = _scenario_for(fc, args.granularity, args.freq, args.drift)
    seed = fc.seed if args.seed is None else args.seed
    manifest = RunManifest(args.config, "sim", cfg.granularity, cfg.freq, cfg.drift, (seed,), args.out)
    log.debug("manifest %s", manifest)
    try:
        result = run_single(cfg, seed, trace=bool(args.trace))
    except ConfigError:
        raise
    except Exception as exc:
        print(f"error: run failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(raw_csv_text(result))
    if args.trace:
        Path(args.trace).write_text("\n".join(result.trace) + "\n")
    print(f"granularity={cfg.granularity} f={cfg.freq:g}Hz tau={cfg.drift:g} seed={seed}")
    print(f"samples={len(result.samples)} events={result.events} wall={result.wall_s:.2f}s")
    print(f"steady_state_mean_sq_error_m2={steady_state_mean(result):.6g}")
    return EXIT_OK


def _raw_path(out: Path, g: str, f: float, d: float, seed: int) -> Path:
    return out / "raw" / f"{g}_f{f:g}_tau{d:g}_seed{seed}.csv"


def _load_raw(path: Path, cfg: ScenarioConfig, seed: int) -> RunResult:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return RunResult(cfg, seed, [ErrorSample(float(r["t_s"]), float(r["sq_error_m2"])) for r in rows])


def _sweep_job(job):
    cfg, seed, path = job
    result = run_single(cfg, seed)
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(raw_csv_text(result))
    tmp.replace(path)
    return result


def cmd_sweep(args) -> int:
    fc = load_config(args.config)
    g = fc.sweep
    grid = SweepGrid(
        tuple(args.granularities or g.granularities), tuple(args.freqs or g.freqs),
        tuple(args.drifts if args.drifts is not None else g.drifts),
        args.repetitions or g.repetitions, g.base_seed if args.base_seed is None else args.base_seed)
    out = Path(args.out_dir)
    (out / "raw").mkdir(parents=True, exist_ok=True)
    seeds = grid.seeds
    cells = list(grid.cells())
    print(f"sweep: {len(cells)} cells x {len(seeds)} repetitions = {len(cells) * len(seeds)} runs -> {out}")

    results: dict = {c: {} for c in cells}
    jobs = []
    for cell in cells:
        cfg = _scenario_for(fc, *cell)
        for seed in seeds:
            path = _raw_path(out, *cell, seed)
            if args.resume and path.exists():
                results[cell][seed] = _load_raw(path, cfg, seed)
            else:
                jobs.append((cell, (cfg, seed, path)))
    if args.max_runs is not None:
        jobs = jobs[:max(0, args.max_runs)]

    failed: dict = {}
    workers = default_workers()
    start = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_sweep_job, job): (cell, job[1]) for cell, job in jobs}
            for fut in as_completed(futures):
                cell, seed = futures[fut]
                try:
                    results[cell][seed] = fut.result()
                except Exception as exc:
                    failed.setdefault(cell, []).append((seed, exc))
    else:
        for cell, job in jobs:
            try:
                results[cell][job[1]] = _sweep_job(job)
            except Exception as exc:
                failed.setdefault(cell, []).append((job[1], exc))
    log.info("sweep executed %d runs in %.1fs", len(jobs), time.perf_counter() - start)

    complete = [(_scenario_for(fc, *c), aggregate([results[c][s] for s in seeds], fc.scenario.sample_period))
                for c in cells if len(results[c]) == len(seeds)]
    rows = write_aggregate_csv(out / "aggregate.csv", complete)
    done = sum(len(v) for v in results.values())
    print(f"completed {done}/{len(cells) * len(seeds)} runs; aggregate rows={rows} "
          f"({len(complete)}/{len(cells)} cells complete)")
    for cell, errs in failed.items():
        for seed, exc in errs:
            print(f"error: cell {cell} seed {seed} failed: {exc}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_live(args) -> int:
    from .live import LiveConfig, LiveRunError, rolling_average, run_live
    from .uav.agents import follower_spec, leader_spec

    fc = load_config(args.config)
    cfg = fc.scenario.with_(freq=args.freq) if args.freq else fc.scenario
    live_cfg = LiveConfig(tick_ms=args.tick_ms or fc.tick_ms, cycle_hint=args.freq or fc.cycle_hint,
                          duration=args.duration, sample_period=cfg.sample_period)
    seed = fc.seed if args.seed is None else args.seed
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    samples: list[ErrorSample] = []
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((*RAW_HEADER, "rolling_10s_sq_error_m2"))
        fh.flush()

        def on_sample(s: ErrorSample):
            samples.append(s)
            avg = rolling_average(samples[-64:], 10.0)[-1].value
            w.writerow(("live", repr(float(cfg.freq)), repr(float(cfg.drift)), seed, repr(s.t),
                        repr(s.value), repr(avg)))
            fh.flush()

        try:
            run_live((leader_spec(cfg), follower_spec(cfg)), cfg, live_cfg, seed, on_sample=on_sample)
        except KeyboardInterrupt:
            print(f"interrupted: {len(samples)} samples written to {args.out}", file=sys.stderr)
            return EXIT_INTERRUPTED
        except LiveRunError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
    tail = [s.value for s in samples[-max(1, len(samples) // 3):]]
    print(f"live: samples={len(samples)} duration={args.duration:g}s "
          f"steady_state_mean_sq_error_m2={sum(tail) / max(1, len(tail)):.6g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"run": cmd_run, "sweep": cmd_sweep, "live": cmd_live}[args.command](args)
    except ConfigError as exc:
        print(f"error: invalid configuration:", file=sys.stderr)
        for e in exc.errors:
            print(f"  - {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_INTERRUPTED


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
