"""Situated devices, range-limited messaging and the simulated environment handle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..bdi.agent import Message
from ..bdi.terms import Atom, Compound, Number, Term, t
from ..env import EnvironmentHandle, UnknownAction, numeric_args
from ..kernel import RngStream, Simulator
from .kinematics import MovementState, Point, distance, position_at

__all__ = ["Device", "apply_move_to", "SimEnvironment", "SimHandle"]


@dataclass
class Device:
    """A situated node; may host several agents, each with its own mailbox."""

    id: str
    anchor: Point
    movement: MovementState | None = None
    kv_store: dict = field(default_factory=dict)
    broker: dict = field(default_factory=dict)
    agents: list = field(default_factory=list)

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.anchor):
            raise ValueError(f"device {self.id} has a non-finite position {self.anchor}")

    def position(self, now: float) -> Point:
        if self.movement is None:
            return self.anchor
        return position_at(self.movement, now)

    def host(self, agent: str) -> None:
        self.agents.append(agent)
        self.broker[agent] = []


def apply_move_to(dev: Device, target: Point, now: float, v_max: float,
                  speed: float | None = None) -> Device:
    """Start moving ``dev`` towards ``target`` from wherever it is at ``now``."""
    if not all(math.isfinite(c) for c in target):
        raise ValueError(f"non-finite target {target}")
    here = dev.position(now)
    speed = v_max if speed is None else min(speed, v_max)
    dev.anchor = here
    if distance(here, target) == 0.0:
        dev.movement = None
    else:
        dev.movement = MovementState(here, (float(target[0]), float(target[1])), now, speed)
    return dev


def _move_to(handle: "SimHandle", args: tuple) -> None:
    x, y = numeric_args("moveTo", args, 2)
    env = handle.env
    apply_move_to(env.device_of(handle.agent), (x, y), env.sim.now, env.max_speed)


def _hover(handle: "SimHandle", args: tuple) -> None:
    env = handle.env
    dev = env.device_of(handle.agent)
    apply_move_to(dev, dev.position(env.sim.now), env.sim.now, env.max_speed)


class SimEnvironment:
    """Devices in a 2D plane driven by a :class:`Simulator` clock."""

    def __init__(self, sim: Simulator, rng: RngStream, comm_range: float, max_speed: float,
                 actions: dict | None = None):
        if not comm_range > 0:
            raise ValueError("communication range must be positive")
        if not max_speed > 0:
            raise ValueError("max speed must be positive")
        self.sim = sim
        self.rng = rng
        self.comm_range = comm_range
        self.max_speed = max_speed
        self.devices: dict[str, Device] = {}
        self.location: dict[str, str] = {}
        self.actions = {"moveTo": _move_to, "hover": _hover, **(actions or {})}
        self._handles: dict[str, SimHandle] = {}
        self.delivered = 0
        self.dropped = 0

    def add_device(self, dev: Device) -> Device:
        self.devices[dev.id] = dev
        return dev

    def place_agent(self, agent: str, device_id: str) -> "SimHandle":
        self.devices[device_id].host(agent)
        self.location[agent] = device_id
        h = self._handles[agent] = SimHandle(self, agent)
        return h

    def handle(self, agent: str) -> "SimHandle":
        return self._handles[agent]

    def device_of(self, agent: str) -> Device:
        return self.devices[self.location[agent]]

    def position_of(self, agent: str) -> Point:
        return self.device_of(agent).position(self.sim.now)

    def neighbors(self, dev: Device, r_c: float | None = None) -> list[Device]:
        """Other devices within ``r_c`` (inclusive) at the current clock."""
        r_c = self.comm_range if r_c is None else r_c
        if not r_c > 0:
            raise ValueError("range must be positive")
        here = dev.position(self.sim.now)
        return [d for d in self.devices.values()
                if d is not dev and distance(here, d.position(self.sim.now)) <= r_c]

    def reachable(self, sender: str, recipient: str) -> bool:
        a, b = self.device_of(sender), self.device_of(recipient)
        if a is b:
            return True
        return distance(a.position(self.sim.now), b.position(self.sim.now)) <= self.comm_range

    def deliver(self, recipient: str, msg: Message) -> None:
        self.device_of(recipient).broker[recipient].append(msg)
        self.delivered += 1

    def drain(self, agent: str) -> tuple:
        box = self.device_of(agent).broker[agent]
        msgs = tuple(box)
        box.clear()
        return msgs


class SimHandle(EnvironmentHandle):
    def __init__(self, env: SimEnvironment, agent: str):
        self.env = env
        self.agent = agent
        self._rng = env.rng.fork(f"agent/{agent}/random")

    def now(self):
        return self.env.sim.now

    def random_uniform(self):
        return self._rng.uniform()

    def perceive(self):
        dev = self.env.device_of(self.agent)
        x, y = dev.position(self.env.sim.now)
        percepts = {t("pos", x, y), t("self", self.agent)}
        for k, v in dev.kv_store.items():
            if isinstance(k, Atom):
                percepts.add(Compound(k.name, (v,)))
        return frozenset(percepts)

    def act(self, name, args=()):
        fn = self.env.actions.get(name)
        if fn is None:
            raise UnknownAction(name)
        fn(self, tuple(args))

    def send(self, to, msg):
        if to not in self.env.location:
            self.env.dropped += 1
            return
        if self.env.reachable(self.agent, to):
            self.env.deliver(to, msg)
        else:
            self.env.dropped += 1

    def broadcast(self, msg):
        for other in self.env.location:
            if other != self.agent and self.env.reachable(self.agent, other):
                self.env.deliver(other, msg)
