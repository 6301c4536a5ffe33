"""
Writing a BDI agent
===================

Plans react to events; one body step runs per reasoning cycle.
"""

from bdisim.bdi import (
    Act, AddBelief, AgentSpecBuilder, AgentState, Broadcast, ExternalInput, Guard, Query, SubGoal, Var,
    on_added, on_goal, run_cycle, t,
)
from bdisim.env import RecordingEnvironment

N, X, Y = Var("N"), Var("X"), Var("Y")

###############################################################################
# An agent program is plain data: initial goals and an ordered plan library.
# ``start`` moves, then delegates to ``go(3)``; finishing ``go`` adds a belief,
# and that belief triggers an announcement.

spec = (AgentSpecBuilder("walker").goal(t("start"))
        .plan(on_goal(t("start")), body=[Act("moveTo", (1, 2)), SubGoal(t("go", 3)), Act("hover")])
        .plan(on_goal(t("go", N)), [Guard(lambda s: s["N"] > 0)],
              [Act("moveTo", (N, N)), AddBelief(t("done", N))])
        .plan(on_added(t("done", X)), body=[Broadcast(t("finished", X))])
        .build())

###############################################################################
# A recording environment stands in for a real backend and keeps every call.

state = AgentState.from_spec(spec, trace=True)
env = RecordingEnvironment()
for cycle in range(1, 8):
    before = len(state.log)
    run_cycle(state, ExternalInput(), env)
    print(f"cycle {cycle}:", state.log[before:])

print("environment calls:", [c[:2] for c in env.calls])

###############################################################################
# Percepts are reconciled per functor: a new ``pos`` replaces the old one and
# both the removal and the addition become events a plan could react to.

watcher = (AgentSpecBuilder("watcher")
           .plan(on_added(t("pos", X, Y)), [Guard(lambda s: s["X"] > 5)], [Act("hover")], name="stop_far")
           .build())
w = AgentState.from_spec(watcher, trace=True)
for x in (1, 7):
    run_cycle(w, ExternalInput(frozenset({t("pos", x, 0)})), env)
print(w.log)
