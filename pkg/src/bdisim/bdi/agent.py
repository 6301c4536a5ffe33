"""Agent programs and agent state.

An :class:`AgentSpec` is pure data: beliefs, goals and an ordered plan
library. It never references a backend; everything it does to the outside
world goes through the environment handle passed to the act phase.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Mapping

from .terms import Term, Var, is_ground, key_of, substitute, to_python, to_term, unify

__all__ = [
    "BeliefAdded", "BeliefRemoved", "GoalAdded", "GoalFailed", "InternalEvent",
    "Trigger", "on_added", "on_removed", "on_goal", "on_failure",
    "Query", "Absent", "Guard", "Bind", "Scope",
    "Act", "SubGoal", "AddBelief", "DropBelief", "Send", "Broadcast",
    "Plan", "AgentSpec", "AgentSpecBuilder",
    "Message", "ExternalInput", "BeliefBase", "Frame", "Intention", "AgentState",
    "TELL", "ACHIEVE",
]

TELL = "tell"
ACHIEVE = "achieve"


# -- internal events --------------------------------------------------------

@dataclass(frozen=True)
class BeliefAdded:
    belief: Term

    def __str__(self):
        return f"+{self.belief}"


@dataclass(frozen=True)
class BeliefRemoved:
    belief: Term

    def __str__(self):
        return f"-{self.belief}"


@dataclass(frozen=True)
class GoalAdded:
    goal: Term
    intention: int | None = None  # set when raised by a SubGoal step

    def __str__(self):
        return f"+!{self.goal}"


@dataclass(frozen=True)
class GoalFailed:
    goal: Term
    intention: int | None = None

    def __str__(self):
        return f"-!{self.goal}"


InternalEvent = BeliefAdded | BeliefRemoved | GoalAdded | GoalFailed


def event_term(ev) -> Term:
    return ev.belief if isinstance(ev, (BeliefAdded, BeliefRemoved)) else ev.goal


# -- plans ------------------------------------------------------------------

@dataclass(frozen=True)
class Trigger:
    kind: type
    pattern: Term

    def match(self, ev) -> dict | None:
        if type(ev) is not self.kind:
            return None
        return unify(self.pattern, event_term(ev))

    def __str__(self):
        return str(self.kind(self.pattern))


def on_added(pattern: Term) -> Trigger:
    return Trigger(BeliefAdded, pattern)


def on_removed(pattern: Term) -> Trigger:
    return Trigger(BeliefRemoved, pattern)


def on_goal(pattern: Term) -> Trigger:
    return Trigger(GoalAdded, pattern)


def on_failure(pattern: Term) -> Trigger:
    return Trigger(GoalFailed, pattern)


@dataclass(frozen=True)
class Query:
    """Context literal satisfied by every belief unifying with ``pattern``."""
    pattern: Term


@dataclass(frozen=True)
class Absent:
    """Negation as failure: no belief unifies with ``pattern``."""
    pattern: Term


@dataclass(frozen=True)
class Guard:
    """Arithmetic test over the current bindings, ``fn(scope) -> bool``."""
    fn: Callable[["Scope"], Any]
    text: str = ""


@dataclass(frozen=True)
class Bind:
    """Binds variable ``var`` to ``fn(scope)``."""
    var: str
    fn: Callable[["Scope"], Any]


@dataclass(frozen=True)
class Act:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class SubGoal:
    goal: Term


@dataclass(frozen=True)
class AddBelief:
    belief: Term


@dataclass(frozen=True)
class DropBelief:
    belief: Term


@dataclass(frozen=True)
class Send:
    to: Term
    payload: Term
    performative: str = TELL


@dataclass(frozen=True)
class Broadcast:
    payload: Term
    performative: str = TELL


@dataclass(frozen=True)
class Plan:
    trigger: Trigger
    context: tuple = ()
    body: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))
        object.__setattr__(self, "body", tuple(self.body))
        if not self.name:
            object.__setattr__(self, "name", str(self.trigger))


@dataclass(frozen=True)
class AgentSpec:
    name: str
    beliefs: tuple = ()
    goals: tuple = ()
    plans: tuple = ()

    def __post_init__(self):
        for b in self.beliefs:
            if not is_ground(b):
                raise ValueError(f"initial belief {b} is not ground")
        object.__setattr__(self, "beliefs", tuple(self.beliefs))
        object.__setattr__(self, "goals", tuple(self.goals))
        object.__setattr__(self, "plans", tuple(self.plans))

    def action_names(self) -> set[str]:
        return {step.name for p in self.plans for step in p.body if isinstance(step, Act)}


class AgentSpecBuilder:
    """Fluent construction of an :class:`AgentSpec`."""

    def __init__(self, name: str):
        self.name = name
        self._beliefs: list[Term] = []
        self._goals: list[Term] = []
        self._plans: list[Plan] = []

    def belief(self, term: Term) -> "AgentSpecBuilder":
        self._beliefs.append(term)
        return self

    def goal(self, term: Term) -> "AgentSpecBuilder":
        self._goals.append(term)
        return self

    def plan(self, trigger: Trigger, context: Iterable = (), body: Iterable = (),
             name: str = "") -> "AgentSpecBuilder":
        self._plans.append(Plan(trigger, tuple(context), tuple(body), name))
        return self

    def build(self) -> AgentSpec:
        return AgentSpec(self.name, tuple(self._beliefs), tuple(self._goals), tuple(self._plans))


# -- communication ----------------------------------------------------------

@dataclass(frozen=True)
class Message:
    sender: str
    payload: Term
    performative: str = TELL

    def __post_init__(self):
        if self.performative not in (TELL, ACHIEVE):
            raise ValueError(f"unknown performative {self.performative!r}")
        if not is_ground(self.payload):
            raise ValueError(f"message payload {self.payload} is not ground")


@dataclass(frozen=True)
class ExternalInput:
    percepts: frozenset = frozenset()
    messages: tuple = ()
    time: float | None = None


# -- belief base ------------------------------------------------------------

class BeliefBase:
    """Set of ground beliefs with a source tag and a stable order.

    Order is the insertion order, except that a belief replacing another one
    of the same functor (an update) takes over the old belief's position.
    """

    def __init__(self):
        self._entries: dict[Term, tuple[str, int]] = {}
        self._by_key: dict[tuple, dict[Term, None]] = {}
        self._next = 0

    def __contains__(self, term) -> bool:
        return term in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Term]:
        return iter(sorted(self._entries, key=lambda b: self._entries[b][1]))

    def source(self, term) -> str:
        return self._entries[term][0]

    def with_key(self, key) -> list[Term]:
        terms = self._by_key.get(key, {})
        return sorted(terms, key=lambda b: self._entries[b][1])

    def add(self, term: Term, source: str = "self", order: int | None = None) -> bool:
        if not is_ground(term):
            raise ValueError(f"belief {term} is not ground")
        if term in self._entries:
            return False
        if order is None:
            order = self._next
            self._next += 1
        self._entries[term] = (source, order)
        self._by_key.setdefault(key_of(term), {})[term] = None
        return True

    def remove(self, term: Term) -> int | None:
        """Remove ``term``; return its order slot, or ``None`` if absent."""
        entry = self._entries.pop(term, None)
        if entry is None:
            return None
        del self._by_key[key_of(term)][term]
        return entry[1]

    def matching(self, pattern: Term, bindings: Mapping | None = None) -> Iterator[dict]:
        try:
            key = key_of(substitute(pattern, bindings or {}))
        except TypeError:
            return
        for b in self.with_key(key):
            env = unify(pattern, b, bindings)
            if env is not None:
                yield env

    def reconcile(self, key, new: Iterable[Term], source: str | None, new_source: str) -> list:
        """Make the beliefs under ``key`` (restricted to ``source`` if given) equal ``new``.

        Returns the generated events, removals before additions; added
        beliefs inherit the order slots of removed ones pairwise.
        """
        new = [b for b in new]
        old = [b for b in self.with_key(key) if source is None or self._entries[b][0] == source]
        gone = [b for b in old if b not in new]
        fresh = [b for b in new if b not in self._entries]
        slots = [self.remove(b) for b in gone]
        events: list = [BeliefRemoved(b) for b in gone]
        for i, b in enumerate(fresh):
            self.add(b, new_source, slots[i] if i < len(slots) else None)
            events.append(BeliefAdded(b))
        return events


class Scope(Mapping):
    """What context guards and binders see: bindings, beliefs and sensed time."""

    def __init__(self, bindings: Mapping, beliefs: BeliefBase, now: float, agent: str):
        self.bindings = bindings
        self.beliefs = beliefs
        self.now = now
        self.agent = agent

    def __getitem__(self, name):
        value = substitute(Var(name), self.bindings)
        if isinstance(value, Var):
            raise KeyError(name)
        return to_python(value)

    def __iter__(self):
        return iter(self.bindings)

    def __len__(self):
        return len(self.bindings)

    def solutions(self, pattern: Term) -> list[dict]:
        return list(self.beliefs.matching(pattern, self.bindings))

    def count(self, pattern: Term) -> int:
        return len(self.solutions(pattern))


# -- intentions and state ---------------------------------------------------

@dataclass
class Frame:
    plan: Plan
    bindings: dict
    pc: int = 0


@dataclass
class Intention:
    id: int
    stack: list = field(default_factory=list)
    suspended: bool = False

    @property
    def top(self) -> Frame:
        return self.stack[-1]


@dataclass
class AgentState:
    name: str
    spec: AgentSpec
    beliefs: BeliefBase = field(default_factory=BeliefBase)
    events: deque = field(default_factory=deque)
    intentions: dict = field(default_factory=dict)
    mailbox: list = field(default_factory=list)
    cursor: int | None = None
    now: float = 0.0
    steps: int = 0
    cycles: int = 0
    next_intention: int = 0
    log: list | None = None

    @classmethod
    def from_spec(cls, spec: AgentSpec, name: str | None = None, trace: bool = False) -> "AgentState":
        st = cls(name or spec.name, spec, log=[] if trace else None)
        for b in spec.beliefs:
            if st.beliefs.add(b, "self"):
                st.events.append(BeliefAdded(b))
        for g in spec.goals:
            st.events.append(GoalAdded(g))
        return st

    def record(self, kind: str, what) -> None:
        if self.log is not None:
            self.log.append((kind, str(what)))

    def live_intentions(self) -> list[Intention]:
        return list(self.intentions.values())

    def solution(self, pattern: Term) -> dict | None:
        """First solution of ``pattern`` against the belief base, or ``None``."""
        return next(self.beliefs.matching(pattern), None)
