"""Concurrent deployment backend.

Every agent runs its control loop in its own thread against wall-clock time.
A mover thread advances devices towards their targets every tick and a
sampler thread records the formation error once per sample period. The
agent programs are the very same :class:`~bdisim.bdi.AgentSpec` values the
simulator runs.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bdi.agent import AgentSpec, AgentState, ExternalInput, Message
from .bdi.interpreter import run_cycle
from .bdi.terms import Atom, Compound, t
from .env import EnvironmentHandle, UnknownAction, check_actions, numeric_args
from .kernel import RngStream
from .sim.builder import place_followers, slot_assignment
from .uav.agents import LEADER, follower_id, scenario_actions
from .uav.config import ScenarioConfig
from .uav.oracle import ErrorSample, formation_error

__all__ = ["LiveConfig", "LiveEnvironment", "LiveHandle", "LiveRunError", "run_live", "rolling_average"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiveConfig:
    tick_ms: float = 50.0
    cycle_hint: float | None = None   # Hz; None runs as fast as the host allows
    duration: float = 60.0
    sample_period: float = 1.0

    def __post_init__(self):
        if not self.tick_ms > 0:
            raise ValueError("tick_ms must be positive")
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")
        if self.cycle_hint is not None and not self.cycle_hint > 0:
            raise ValueError("cycle_hint must be positive when given")


class LiveRunError(RuntimeError):
    pass


class LiveEnvironment:
    """Shared, lock-protected world state: positions, targets, mailboxes."""

    def __init__(self, comm_range: float, max_speed: float, actions: dict | None = None,
                 clock: Callable[[], float] = time.monotonic):
        self.comm_range = comm_range
        self.max_speed = max_speed
        self.lock = threading.RLock()
        self.positions: dict[str, tuple[float, float]] = {}
        self.targets: dict[str, tuple[float, float] | None] = {}
        self.kv_store: dict[str, dict] = {}
        self.mailboxes: dict[str, list[Message]] = {}
        self.actions = {"moveTo": _move_to, "hover": _hover, **(actions or {})}
        self._clock = clock
        self.t0 = clock()

    def elapsed(self) -> float:
        return self._clock() - self.t0

    def add_agent(self, agent: str, pos: tuple[float, float]) -> None:
        with self.lock:
            self.positions[agent] = (float(pos[0]), float(pos[1]))
            self.targets[agent] = None
            self.kv_store[agent] = {}
            self.mailboxes[agent] = []

    def position_of(self, agent: str) -> tuple[float, float]:
        with self.lock:
            return self.positions[agent]

    def snapshot(self) -> dict[str, tuple[float, float]]:
        with self.lock:
            return dict(self.positions)

    def drain(self, agent: str) -> tuple:
        with self.lock:
            msgs = tuple(self.mailboxes[agent])
            self.mailboxes[agent].clear()
            return msgs

    def in_range(self, a: str, b: str) -> bool:
        pa, pb = self.positions[a], self.positions[b]
        return math.hypot(pa[0] - pb[0], pa[1] - pb[1]) <= self.comm_range

    def step_movement(self, dt: float) -> None:
        """Move every device towards its target by at most ``max_speed * dt``."""
        budget = self.max_speed * dt
        with self.lock:
            for agent, target in self.targets.items():
                if target is None:
                    continue
                x, y = self.positions[agent]
                dx, dy = target[0] - x, target[1] - y
                dist = math.hypot(dx, dy)
                if dist <= budget:
                    self.positions[agent] = target
                    self.targets[agent] = None
                else:
                    f = budget / dist
                    self.positions[agent] = (x + dx * f, y + dy * f)


def _move_to(handle: "LiveHandle", args: tuple) -> None:
    x, y = numeric_args("moveTo", args, 2)
    with handle.env.lock:
        handle.env.targets[handle.agent] = (x, y)


def _hover(handle: "LiveHandle", args: tuple) -> None:
    with handle.env.lock:
        handle.env.targets[handle.agent] = None


class LiveHandle(EnvironmentHandle):
    def __init__(self, env: LiveEnvironment, agent: str, rng: RngStream):
        self.env = env
        self.agent = agent
        self._rng = rng
        self._last = 0.0

    def now(self):
        # monotone per agent even if the clock source is not
        self._last = max(self._last, self.env.elapsed())
        return self._last

    def random_uniform(self):
        return self._rng.uniform()

    def perceive(self):
        with self.env.lock:
            x, y = self.env.positions[self.agent]
            kv = dict(self.env.kv_store[self.agent])
        percepts = {t("pos", x, y), t("self", self.agent)}
        percepts.update(Compound(k.name, (v,)) for k, v in kv.items() if isinstance(k, Atom))
        return frozenset(percepts)

    def act(self, name, args=()):
        fn = self.env.actions.get(name)
        if fn is None:
            raise UnknownAction(name)
        fn(self, tuple(args))

    def send(self, to, msg):
        with self.env.lock:
            if to in self.env.mailboxes and self.env.in_range(self.agent, to):
                self.env.mailboxes[to].append(msg)

    def broadcast(self, msg):
        with self.env.lock:
            for other, box in self.env.mailboxes.items():
                if other != self.agent and self.env.in_range(self.agent, other):
                    box.append(msg)


class _AgentLoop(threading.Thread):
    def __init__(self, state: AgentState, handle: LiveHandle, stop: threading.Event,
                 period: float | None, errors: list):
        super().__init__(name=f"agent-{state.name}", daemon=True)
        self.state = state
        self.handle = handle
        self.stop = stop
        self.period = period
        self.errors = errors
        self.lock = threading.Lock()

    def run(self):
        env = self.handle.env
        try:
            while not self.stop.is_set():
                start = env.elapsed()
                inp = ExternalInput(self.handle.perceive(), env.drain(self.state.name), self.handle.now())
                with self.lock:
                    run_cycle(self.state, inp, self.handle)
                if self.period is not None:
                    self.stop.wait(max(0.0, start + self.period - env.elapsed()))
                else:
                    time.sleep(0)
        except Exception as exc:  # surfaced by run_live
            self.errors.append((self.state.name, exc))
            self.stop.set()


def rolling_average(series, window: float) -> list[ErrorSample]:
    """Trailing mean over the samples with ``t`` in ``(t_i - window, t_i]``."""
    if not window > 0:
        raise ValueError("window must be positive")
    samples = list(series)
    ts = np.array([s.t for s in samples])
    vs = np.array([s.value for s in samples])
    csum = np.concatenate([[0.0], np.cumsum(vs)])
    out = []
    for i, s in enumerate(samples):
        lo = int(np.searchsorted(ts, s.t - window, side="right"))
        out.append(ErrorSample(s.t, float((csum[i + 1] - csum[lo]) / (i + 1 - lo))))
    return out


def run_live(specs: tuple[AgentSpec, AgentSpec], scenario: ScenarioConfig, cfg: LiveConfig, seed: int,
             on_sample: Callable[[ErrorSample], None] | None = None,
             stop: threading.Event | None = None) -> list[ErrorSample]:
    """Run leader and followers as threads for ``cfg.duration`` wall-clock seconds.

    ``specs`` is ``(leader, follower)``. Samples are returned (and passed to
    ``on_sample`` as they are taken). Setting ``stop`` ends the run early.
    """
    actions = scenario_actions()
    try:
        check_actions(specs, actions)
    except UnknownAction as exc:
        raise LiveRunError(f"cannot deploy: {exc}") from exc

    root = RngStream(seed)
    env = LiveEnvironment(scenario.comm_range, scenario.max_speed, actions)
    stop = stop or threading.Event()
    errors: list = []
    names = [LEADER] + [follower_id(i) for i in range(scenario.n_followers)]
    spots = [(0.0, 0.0)] + place_followers(scenario.n_followers, scenario.arena_radius,
                                           root.fork("placement"))
    loops = []
    period = None if cfg.cycle_hint is None else 1.0 / cfg.cycle_hint
    for name, pos in zip(names, spots):
        env.add_agent(name, pos)
    for name in names:
        spec = specs[0] if name == LEADER else specs[1]
        handle = LiveHandle(env, name, root.fork(f"agent/{name}/random"))
        loops.append(_AgentLoop(AgentState.from_spec(spec, name), handle, stop, period, errors))
    followers = [lp for lp in loops if lp.state.name != LEADER]

    def measure() -> float:
        if not followers:
            return 0.0
        assignment = {}
        for lp in followers:
            with lp.lock:
                assignment.update(slot_assignment([lp.state]))
        pos = env.snapshot()
        return formation_error(pos[LEADER], {lp.state.name: pos[lp.state.name] for lp in followers},
                               assignment, scenario)

    tick = cfg.tick_ms / 1000.0

    def mover():
        last = env.elapsed()
        while not stop.wait(tick):
            now = env.elapsed()
            env.step_movement(now - last)
            last = now

    samples: list[ErrorSample] = []

    def sampler():
        k = 0
        while k * cfg.sample_period <= cfg.duration + 1e-9:
            due = k * cfg.sample_period
            if stop.wait(max(0.0, due - env.elapsed())):
                return
            s = ErrorSample(due, measure())
            samples.append(s)
            if on_sample is not None:
                on_sample(s)
            k += 1
        stop.set()

    env.t0 = env._clock()
    threads = [threading.Thread(target=mover, name="mover", daemon=True),
               threading.Thread(target=sampler, name="sampler", daemon=True), *loops]
    for th in threads:
        th.start()
    try:
        while not stop.wait(0.1):
            pass
    finally:
        stop.set()
        for th in threads:
            th.join(timeout=5.0)
    if errors:
        agent, exc = errors[0]
        raise LiveRunError(f"agent {agent} aborted: {exc!r}") from exc
    log.info("live run finished: %d samples, cycles per agent %s", len(samples),
             {lp.state.name: lp.state.cycles for lp in loops})
    return samples
