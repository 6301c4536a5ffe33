"""The portable environment contract.

Agent programs only ever see an :class:`EnvironmentHandle`. Each backend
(simulated or live) supplies one handle per agent; all time, randomness,
perception, action and messaging goes through it.
"""

from __future__ import annotations

import abc
from typing import Callable, Iterable, Mapping

from .bdi.agent import ACHIEVE, TELL, AgentSpec, Message
from .bdi.interpreter import ActionError
from .bdi.terms import Term, to_python

__all__ = [
    "CAPABILITIES", "BUILTIN_ACTIONS", "ActionError", "UnknownAction", "Message", "TELL", "ACHIEVE",
    "EnvironmentHandle", "RecordingEnvironment", "ActionFn", "missing_actions", "check_actions",
    "numeric_args",
]

CAPABILITIES = frozenset({"now", "random_uniform", "perceive", "act", "send", "broadcast"})

#: Actions every backend provides; scenarios may register more.
BUILTIN_ACTIONS = frozenset({"moveTo", "hover"})

#: ``fn(handle, args)``; scenario actions are written against the handle only.
ActionFn = Callable[["EnvironmentHandle", tuple], None]


class UnknownAction(ActionError):
    def __init__(self, name: str):
        super().__init__(f"unknown action {name!r}")
        self.name = name


class EnvironmentHandle(abc.ABC):
    """One agent's view of its environment."""

    agent: str

    @abc.abstractmethod
    def now(self) -> float:
        """Seconds: virtual clock in simulation, time since run start when live."""

    @abc.abstractmethod
    def random_uniform(self) -> float:
        """A draw in [0, 1) from this agent's seeded stream."""

    @abc.abstractmethod
    def perceive(self) -> frozenset:
        """Percept snapshot; always contains ``pos(X, Y)`` of the hosting device."""

    @abc.abstractmethod
    def act(self, name: str, args: tuple = ()) -> None:
        """Request action ``name``; raises :class:`UnknownAction` if not registered."""

    @abc.abstractmethod
    def send(self, to: str, msg: Message) -> None:
        """Unicast; silently dropped if the recipient is out of range."""

    @abc.abstractmethod
    def broadcast(self, msg: Message) -> None:
        """Deliver to every other agent within communication range."""


def numeric_args(name: str, args: tuple, n: int) -> tuple[float, ...]:
    if len(args) != n:
        raise ActionError(f"{name} expects {n} arguments, got {len(args)}")
    vals = tuple(to_python(a) for a in args)
    if not all(isinstance(v, float) for v in vals):
        raise ActionError(f"{name} expects numeric arguments, got {args}")
    return vals


def missing_actions(specs: Iterable[AgentSpec], registered: Iterable[str]) -> set[str]:
    known = set(registered) | BUILTIN_ACTIONS
    return {a for s in specs for a in s.action_names()} - known


def check_actions(specs: Iterable[AgentSpec], registered: Iterable[str]) -> None:
    missing = missing_actions(specs, registered)
    if missing:
        raise UnknownAction(", ".join(sorted(missing)))


class RecordingEnvironment(EnvironmentHandle):
    """Stand-in environment that records every call made by an agent.

    Useful to check that a program stays inside :data:`CAPABILITIES`.
    """

    def __init__(self, agent: str = "agent", percepts: Iterable[Term] = (), clock: float = 0.0,
                 actions: Iterable[str] | None = None, seed: int = 0):
        from .kernel import RngStream

        self.agent = agent
        self.percepts = frozenset(percepts)
        self.clock = clock
        self.actions = None if actions is None else set(actions) | BUILTIN_ACTIONS
        self.calls: list[tuple] = []
        self._rng = RngStream(seed, f"mock/{agent}")

    def now(self):
        self.calls.append(("now",))
        return self.clock

    def random_uniform(self):
        self.calls.append(("random_uniform",))
        return self._rng.uniform()

    def perceive(self):
        self.calls.append(("perceive",))
        return self.percepts

    def act(self, name, args=()):
        self.calls.append(("act", name, tuple(args)))
        if self.actions is not None and name not in self.actions:
            raise UnknownAction(name)

    def send(self, to, msg):
        self.calls.append(("send", to, msg))

    def broadcast(self, msg):
        self.calls.append(("broadcast", msg))

    @property
    def capabilities_used(self) -> set[str]:
        return {c[0] for c in self.calls}
