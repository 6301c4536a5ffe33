"""Mapping BDI control-loop phases onto simulation events.

Each agent owns a :class:`PhaseScheduler` that cycles Sense -> Deliberate ->
Act with one distribution per phase. The granularity only decides which
distributions are used:

* AMA: sense on a Dirac comb ``tau0 + n*T`` shared period, other phases ASAP;
  every agent runs exactly one full cycle per period.
* ACLI: sense after a sampled inter-cycle interval, other phases ASAP; a
  whole cycle is one atomic block at one timestamp.
* ACLP: every phase is separately delayed, so phases of different agents
  interleave.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..bdi.agent import AgentState, ExternalInput, Intention
from ..bdi.interpreter import act, deliberate, sense
from ..kernel import CHAINED, NORMAL, RngStream, Simulator
from ..timedist import Asap, DiracComb, Exponential, TimeDistribution, cycle_interval, next_occurrence
from .environment import SimEnvironment

__all__ = ["Phase", "GranularityMode", "AMA", "ACLI", "ACLP", "granularity_mode",
           "PhaseScheduler", "schedule_phase", "AgentRunner"]


class Phase(enum.Enum):
    SENSE = "sense"
    DELIBERATE = "deliberate"
    ACT = "act"


class GranularityMode:
    name = ""

    def distributions(self, tau0: float) -> tuple[TimeDistribution, TimeDistribution, TimeDistribution]:
        raise NotImplementedError


@dataclass(frozen=True)
class AMA(GranularityMode):
    period: float
    name = "ama"

    def distributions(self, tau0):
        if not 0 <= tau0 < self.period:
            raise ValueError(f"AMA start offset {tau0} must lie in [0, {self.period})")
        return DiracComb(tau0, self.period), Asap(), Asap()


@dataclass(frozen=True)
class ACLI(GranularityMode):
    sense: TimeDistribution
    name = "acli"

    def distributions(self, tau0):
        return self.sense, Asap(), Asap()


@dataclass(frozen=True)
class ACLP(GranularityMode):
    sense: TimeDistribution
    deliberate: TimeDistribution
    act: TimeDistribution
    name = "aclp"

    def distributions(self, tau0):
        return self.sense, self.deliberate, self.act


def granularity_mode(name: str, freq: float, drift: float = 0.0,
                     drift_reading: str = "frequency") -> GranularityMode:
    """The experiment's granularity settings for one (mode, f, tau) cell."""
    name = name.lower()
    if name == "ama":
        return AMA(1.0 / freq)
    interval = cycle_interval(freq, drift, drift_reading)
    if name == "acli":
        return ACLI(interval)
    if name == "aclp":
        return ACLP(interval, Exponential(freq), Exponential(freq))
    raise ValueError(f"unknown granularity {name!r}; expected ama, acli or aclp")


@dataclass
class PhaseScheduler:
    agent: str
    sense_dist: TimeDistribution
    deliberate_dist: TimeDistribution
    act_dist: TimeDistribution
    rng: RngStream
    phase: Phase = Phase.SENSE
    cycle_start: float | None = None
    in_flight: int | None = None
    _streams: dict = field(default_factory=dict, repr=False)

    def stream(self, phase: Phase) -> RngStream:
        if phase not in self._streams:
            self._streams[phase] = self.rng.fork(phase.value)
        return self._streams[phase]

    def dist(self, phase: Phase) -> TimeDistribution:
        return {Phase.SENSE: self.sense_dist, Phase.DELIBERATE: self.deliberate_dist,
                Phase.ACT: self.act_dist}[phase]


def schedule_phase(sched: PhaseScheduler, sim: Simulator, handler, first_at: float | None = None) -> int:
    """Schedule ``sched.phase`` for ``sched.agent`` and return the event id.

    The next sense after an act fires at ``max(now, next occurrence after the
    previous cycle start)``, so the configured frequency acts as a ceiling.
    """
    if sched.in_flight is not None:
        raise RuntimeError(f"agent {sched.agent} already has a phase event in flight")
    phase = sched.phase
    d = sched.dist(phase)
    if first_at is not None:
        when = first_at
    elif phase is Phase.SENSE:
        when = max(sim.now, next_occurrence(d, sched.cycle_start, sched.stream(phase)))
    else:
        when = next_occurrence(d, sim.now, sched.stream(phase))
    priority = CHAINED if d.asap and phase is not Phase.SENSE else NORMAL
    sched.in_flight = sim.schedule(when, handler, priority=priority,
                                   label=f"{sched.agent} {phase.value}")
    return sched.in_flight


class AgentRunner:
    """Drives one agent's control loop as simulation events."""

    def __init__(self, state: AgentState, env: SimEnvironment, sched: PhaseScheduler):
        self.state = state
        self.env = env
        self.handle = env.handle(state.name)
        self.sched = sched
        self.selected: Intention | None = None

    @property
    def sim(self) -> Simulator:
        return self.env.sim

    def start(self, tau0: float) -> None:
        self.sched.phase = Phase.SENSE
        schedule_phase(self.sched, self.sim, self.fire, first_at=tau0)

    def fire(self) -> None:
        s = self.sched
        s.in_flight = None
        if s.phase is Phase.SENSE:
            s.cycle_start = self.sim.now
            inp = ExternalInput(self.handle.perceive(), self.env.drain(self.state.name), self.sim.now)
            sense(self.state, inp)
            s.phase = Phase.DELIBERATE
        elif s.phase is Phase.DELIBERATE:
            _, self.selected = deliberate(self.state)
            s.phase = Phase.ACT
        else:
            act(self.state, self.selected, self.handle)
            self.selected = None
            self.state.cycles += 1
            s.phase = Phase.SENSE
        schedule_phase(s, self.sim, self.fire)
