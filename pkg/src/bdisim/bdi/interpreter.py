"""The three control-loop phases: sense, deliberate, act.

Selection functions are fixed: events FIFO, plans first-applicable in
declaration order, intentions round-robin (suspended ones skipped).
"""

from __future__ import annotations

import logging
from typing import Iterator

from .agent import (
    ACHIEVE, Absent, Act, AddBelief, AgentState, Bind, BeliefAdded, BeliefRemoved, Broadcast,
    DropBelief, ExternalInput, Frame, GoalAdded, GoalFailed, Guard, Intention, Message, Plan,
    Query, Scope, Send, SubGoal,
)
from .terms import Term, Var, is_ground, key_of, substitute, to_python, to_term, unify

__all__ = ["ActionError", "sense", "deliberate", "act", "run_cycle", "applicable_plan"]

log = logging.getLogger(__name__)


class ActionError(RuntimeError):
    """An environment refused an action; the act phase turns it into an intention failure."""


def sense(state: AgentState, inp: ExternalInput) -> AgentState:
    """Fold percepts and messages into the belief base and event queue."""
    for p in inp.percepts:
        if not is_ground(p):
            raise ValueError(f"percept {p} is not ground")
    if inp.time is not None:
        state.now = inp.time
    by_key: dict = {}
    for p in sorted(inp.percepts, key=str):
        by_key.setdefault(key_of(p), []).append(p)
    for key, percepts in by_key.items():
        state.events.extend(state.beliefs.reconcile(key, percepts, None, "percept"))
    for msg in inp.messages:
        if msg.performative == ACHIEVE:
            state.events.append(GoalAdded(msg.payload))
        else:
            # a sender's latest told fact replaces its earlier one with the same functor
            state.events.extend(
                state.beliefs.reconcile(key_of(msg.payload), [msg.payload], msg.sender, msg.sender))
        state.record("message", f"{msg.performative} {msg.payload} from {msg.sender}")
    return state


def _solve(context: tuple, bindings: dict, scope_of) -> Iterator[dict]:
    if not context:
        yield bindings
        return
    head, rest = context[0], context[1:]
    if isinstance(head, Query):
        for env in scope_of(bindings).beliefs.matching(head.pattern, bindings):
            yield from _solve(rest, env, scope_of)
    elif isinstance(head, Absent):
        if next(scope_of(bindings).beliefs.matching(head.pattern, bindings), None) is None:
            yield from _solve(rest, bindings, scope_of)
    elif isinstance(head, Guard):
        if head.fn(scope_of(bindings)):
            yield from _solve(rest, bindings, scope_of)
    elif isinstance(head, Bind):
        value = to_term(head.fn(scope_of(bindings)))
        bound = substitute(Var(head.var), bindings)
        if isinstance(bound, Var):
            yield from _solve(rest, {**bindings, head.var: value}, scope_of)
        elif bound == value:
            yield from _solve(rest, bindings, scope_of)
    else:
        raise TypeError(f"unknown context literal {head!r}")


def applicable_plan(state: AgentState, ev) -> tuple[Plan, dict] | None:
    """First plan (declaration order) whose trigger unifies and context holds."""
    def scope_of(b):
        return Scope(b, state.beliefs, state.now, state.name)

    for plan in state.spec.plans:
        env = plan.trigger.match(ev)
        if env is None:
            continue
        solution = next(_solve(plan.context, env, scope_of), None)
        if solution is not None:
            return plan, solution
    return None


def _fail_intention(state: AgentState, intention: Intention, goal: Term) -> None:
    _remove_intention(state, intention.id)
    state.events.append(GoalFailed(goal))
    state.record("fail", goal)


def _remove_intention(state: AgentState, iid: int) -> None:
    if iid not in state.intentions:
        return
    ids = list(state.intentions)
    if state.cursor == iid:
        pos = ids.index(iid)
        state.cursor = ids[pos - 1] if pos > 0 else None
    del state.intentions[iid]


def _select_event(state: AgentState):
    """Pop the first event that can be acted upon.

    Belief and failure events no plan applies to are discarded on the way;
    a goal event is always returned so that its failure can be handled.
    """
    while state.events:
        ev = state.events.popleft()
        found = applicable_plan(state, ev)
        if found is not None or isinstance(ev, GoalAdded):
            return ev, found
        state.record("discard", ev)
    return None, None


def _select_intention(state: AgentState) -> Intention | None:
    ids = [i for i, it in state.intentions.items() if not it.suspended and it.stack]
    if not ids:
        return None
    if state.cursor is None:
        chosen = ids[0]
    else:
        later = [i for i in ids if i > state.cursor]
        chosen = later[0] if later else ids[0]
    state.cursor = chosen
    return state.intentions[chosen]


def deliberate(state: AgentState) -> tuple[AgentState, Intention | None]:
    ev, found = _select_event(state)
    if ev is not None:
        state.record("event", ev)
        parent = None
        if isinstance(ev, GoalAdded) and ev.intention is not None:
            parent = state.intentions.get(ev.intention)
        if found is None:
            # a goal nobody can pursue: drop the waiting intention, signal failure
            if parent is not None:
                _remove_intention(state, parent.id)
            state.events.append(GoalFailed(ev.goal))
            state.record("fail", ev.goal)
        else:
            plan, env = found
            state.record("plan", plan.name)
            frame = Frame(plan, env)
            if parent is not None:
                parent.stack.append(frame)
                parent.suspended = False
            else:
                it = Intention(state.next_intention, [frame])
                state.next_intention += 1
                state.intentions[it.id] = it
            _pop_finished(state, parent or state.intentions[state.next_intention - 1])
    return state, _select_intention(state)


def _pop_finished(state: AgentState, it: Intention) -> None:
    while it.stack and it.top.pc >= len(it.top.plan.body):
        it.stack.pop()
    if not it.stack and not it.suspended:
        _remove_intention(state, it.id)


def _ground(term: Term, bindings: dict, what: str) -> Term:
    out = substitute(term, bindings)
    if not is_ground(out):
        raise ActionError(f"{what} {out} is not ground")
    return out


def act(state: AgentState, selected: Intention | None, env) -> AgentState:
    """Execute exactly one body step of ``selected``'s top plan instance."""
    if selected is None or selected.id not in state.intentions:
        return state
    frame = selected.top
    step = frame.plan.body[frame.pc]
    b = frame.bindings
    frame.pc += 1
    state.steps += 1
    try:
        if isinstance(step, Act):
            args = tuple(_ground(to_term(a), b, "argument") for a in step.args)
            state.record("action", f"{step.name}({', '.join(map(str, args))})")
            env.act(step.name, args)
        elif isinstance(step, SubGoal):
            goal = _ground(step.goal, b, "goal")
            selected.suspended = True
            state.events.append(GoalAdded(goal, selected.id))
            state.record("subgoal", goal)
        elif isinstance(step, AddBelief):
            belief = _ground(step.belief, b, "belief")
            if state.beliefs.add(belief, "self"):
                state.events.append(BeliefAdded(belief))
            state.record("add", belief)
        elif isinstance(step, DropBelief):
            pattern = substitute(step.belief, b)
            belief = next((x for x in state.beliefs.with_key(key_of(pattern))
                           if unify(pattern, x) is not None), None)
            if belief is not None:
                state.beliefs.remove(belief)
                state.events.append(BeliefRemoved(belief))
                state.record("drop", belief)
        elif isinstance(step, Send):
            to = _ground(step.to, b, "recipient")
            msg = Message(state.name, _ground(step.payload, b, "payload"), step.performative)
            state.record("send", f"{msg.performative} {msg.payload} to {to}")
            env.send(str(to_python(to)), msg)
        elif isinstance(step, Broadcast):
            msg = Message(state.name, _ground(step.payload, b, "payload"), step.performative)
            state.record("broadcast", f"{msg.performative} {msg.payload}")
            env.broadcast(msg)
        else:
            raise TypeError(f"unknown body step {step!r}")
    except ActionError as exc:
        log.debug("agent %s: intention %d failed: %s", state.name, selected.id, exc)
        _fail_intention(state, selected, substitute(frame.plan.trigger.pattern, b))
        return state
    _pop_finished(state, selected)
    return state


def run_cycle(state: AgentState, inp: ExternalInput, env) -> AgentState:
    """One full control-loop iteration: sense, deliberate, act."""
    sense(state, inp)
    state, selected = deliberate(state)
    act(state, selected, env)
    state.cycles += 1
    return state
