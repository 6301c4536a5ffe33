"""Wiring the formation scenario into a runnable simulation."""

from __future__ import annotations

import math

from ..bdi.agent import AgentSpec, AgentState
from ..bdi.terms import Var, t, to_python
from ..env import missing_actions
from ..kernel import NORMAL, RngStream, Simulator
from ..uav.agents import LEADER, follower_id, follower_spec, leader_spec, scenario_actions
from ..uav.config import ConfigError, ScenarioConfig
from ..uav.oracle import ErrorSample, formation_error
from .environment import Device, SimEnvironment
from .scheduler import AgentRunner, PhaseScheduler

__all__ = ["Simulation", "build_simulation", "place_followers", "slot_assignment"]

_SLOT = t("slot", Var("K"), Var("N"))


def place_followers(n: int, radius: float, rng: RngStream) -> list[tuple[float, float]]:
    """``n`` points uniform in the disc of ``radius`` around the origin (rejection sampling)."""
    pts = []
    while len(pts) < n:
        x, y = (2 * rng.uniform() - 1) * radius, (2 * rng.uniform() - 1) * radius
        if x * x + y * y <= radius * radius:
            pts.append((x, y))
    return pts


def slot_assignment(states) -> dict[str, int]:
    """Slots the followers have been told, keyed by follower id."""
    out = {}
    for st in states:
        sol = st.solution(_SLOT)
        if sol is not None:
            out[st.name] = int(to_python(sol["K"]))
    return out


class Simulation:
    def __init__(self, cfg: ScenarioConfig, seed: int, sim: Simulator, env: SimEnvironment,
                 runners: dict[str, AgentRunner]):
        self.cfg = cfg
        self.seed = seed
        self.sim = sim
        self.env = env
        self.runners = runners
        self.samples: list[ErrorSample] = []
        self._followers = [a for a in runners if a != LEADER]

    @property
    def trace(self) -> list[str]:
        return self.sim.trace

    def measure(self) -> float:
        if not self._followers:
            return 0.0
        positions = {u: self.env.position_of(u) for u in self._followers}
        assignment = slot_assignment(self.runners[u].state for u in self._followers)
        return formation_error(self.env.position_of(LEADER), positions, assignment, self.cfg)

    def _schedule_sample(self, k: int) -> None:
        when = k * self.cfg.sample_period
        if when > self.cfg.duration + 1e-9:
            return

        def fire():
            self.samples.append(ErrorSample(self.sim.now, self.measure()))
            self._schedule_sample(k + 1)

        self.sim.schedule(when, fire, priority=NORMAL, label="sample")

    def run(self, until: float | None = None) -> list[ErrorSample]:
        self.sim.run_until(self.cfg.duration if until is None else until)
        return self.samples


def build_simulation(cfg: ScenarioConfig, seed: int, specs: tuple[AgentSpec, AgentSpec] | None = None,
                     trace: bool = False, agent_trace: bool = False) -> Simulation:
    """Place the leader at the origin and the followers in the arena, then
    register one phase scheduler per agent and a metric sampler.

    ``specs`` is ``(leader, follower)``; by default the scenario's own programs.
    """
    if specs is None:
        specs = (leader_spec(cfg), follower_spec(cfg))
    actions = scenario_actions()
    missing = missing_actions(specs, actions)
    if missing:
        raise ConfigError([f"action {a!r} is not registered in the simulated environment"
                           for a in sorted(missing)])
    root = RngStream(seed)
    sim = Simulator(record_trace=trace)
    env = SimEnvironment(sim, root.fork("env"), cfg.comm_range, cfg.max_speed, actions)
    mode = cfg.mode()

    agents = [(LEADER, specs[0], (0.0, 0.0))]
    spots = place_followers(cfg.n_followers, cfg.arena_radius, root.fork("placement"))
    agents += [(follower_id(i), specs[1], p) for i, p in enumerate(spots)]

    runners = {}
    for name, spec, pos in agents:
        env.add_device(Device(f"uav/{name}", pos))
        env.place_agent(name, f"uav/{name}")
        state = AgentState.from_spec(spec, name, trace=agent_trace)
        agent_rng = root.fork(f"agent/{name}")
        period = 1.0 / cfg.freq
        # random start delay in [0, T); AMA needs it strictly below the period
        tau0 = agent_rng.fork("start").uniform() * period
        sense_d, delib_d, act_d = mode.distributions(tau0)
        runners[name] = AgentRunner(state, env, PhaseScheduler(name, sense_d, delib_d, act_d, agent_rng))
        runners[name].start(tau0)

    simulation = Simulation(cfg, seed, sim, env, runners)
    simulation._schedule_sample(0)
    return simulation
