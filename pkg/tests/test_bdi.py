from bdisim.bdi import (
    Absent, Act, AddBelief, AgentSpec, AgentSpecBuilder, AgentState, BeliefAdded, Bind, Broadcast,
    DropBelief, ExternalInput, GoalAdded, GoalFailed, Guard, Message, Plan, Query, SubGoal, Var,
    act, deliberate, on_added, on_goal, run_cycle, sense, t,
)
from bdisim.env import RecordingEnvironment


def fresh(spec, trace=False):
    return AgentState.from_spec(spec, trace=trace)


def test_new_percept_becomes_belief_and_event():
    st = fresh(AgentSpec("a"))
    sense(st, ExternalInput(frozenset({t("pos", 3, 4)})))
    assert list(st.beliefs) == [t("pos", 3, 4)]
    assert list(st.events) == [BeliefAdded(t("pos", 3, 4))]


def test_repeated_percept_is_idempotent():
    st = fresh(AgentSpec("a"))
    sense(st, ExternalInput(frozenset({t("pos", 3, 4)})))
    st.events.clear()
    sense(st, ExternalInput(frozenset({t("pos", 3, 4)})))
    assert not st.events


def test_percept_update_removes_stale_value():
    st = fresh(AgentSpec("a"))
    sense(st, ExternalInput(frozenset({t("pos", 3, 4)})))
    st.events.clear()
    sense(st, ExternalInput(frozenset({t("pos", 5, 4)})))
    assert list(st.beliefs) == [t("pos", 5, 4)]
    assert [str(e) for e in st.events] == ["-pos(3, 4)", "+pos(5, 4)"]


def test_achieve_message_becomes_goal():
    st = fresh(AgentSpec("a"))
    sense(st, ExternalInput(messages=(Message("b", t("join", 2.5), "achieve"),)))
    assert list(st.events) == [GoalAdded(t("join", 2.5))]


def test_tell_message_replaces_same_sender_fact():
    st = fresh(AgentSpec("a"))
    sense(st, ExternalInput(messages=(Message("b", t("seen", 1)), Message("c", t("seen", 9)))))
    sense(st, ExternalInput(messages=(Message("b", t("seen", 2)),)))
    assert list(st.beliefs) == [t("seen", 2), t("seen", 9)]


def test_first_applicable_plan_wins():
    spec = (AgentSpecBuilder("a").goal(t("g"))
            .plan(on_goal(t("g")), [Guard(lambda s: False)], [Act("hover")], name="P1")
            .plan(on_goal(t("g")), [Guard(lambda s: True)], [Act("hover")], name="P2")
            .build())
    st = fresh(spec)
    st, it = deliberate(st)
    assert it.top.plan.name == "P2"


def test_round_robin_over_intentions():
    spec = (AgentSpecBuilder("a").goal(t("g1")).goal(t("g2"))
            .plan(on_goal(t("g1")), body=[Act("hover"), Act("hover")])
            .plan(on_goal(t("g2")), body=[Act("hover"), Act("hover")])
            .build())
    st = fresh(spec)
    env = RecordingEnvironment()
    run_cycle(st, ExternalInput(), env)
    run_cycle(st, ExternalInput(), env)
    assert len(st.intentions) == 2 and st.cursor == 1
    st.cursor = 0
    _, it = deliberate(st)
    assert it.id == 1


def test_goal_without_plan_fails():
    st = fresh(AgentSpec("a", goals=(t("g"),)))
    deliberate(st)
    assert list(st.events) == [GoalFailed(t("g"))]


def test_add_belief_completes_intention():
    spec = AgentSpec("a", goals=(t("g"),), plans=(Plan(on_goal(t("g")), body=[AddBelief(t("b"))]),))
    st = fresh(spec)
    st, it = deliberate(st)
    act(st, it, RecordingEnvironment())
    assert t("b") in st.beliefs
    assert list(st.events) == [BeliefAdded(t("b"))]
    assert not st.intentions


def test_act_dispatches_one_step():
    spec = AgentSpec("a", goals=(t("g"),),
                     plans=(Plan(on_goal(t("g")), body=[Act("moveTo", (1, 2)), Act("hover")]),))
    st = fresh(spec)
    env = RecordingEnvironment()
    st, it = deliberate(st)
    act(st, it, env)
    assert env.calls == [("act", "moveTo", (t("x", 1, 2).args))]
    assert it.top.pc == 1


def test_subgoal_suspends_until_child_plan_completes():
    spec = (AgentSpecBuilder("a").goal(t("outer"))
            .plan(on_goal(t("outer")), body=[SubGoal(t("inner")), Act("hover")])
            .plan(on_goal(t("inner")), body=[Act("moveTo", (0, 0))])
            .build())
    st = fresh(spec)
    env = RecordingEnvironment()
    run_cycle(st, ExternalInput(), env)          # outer: subgoal issued
    it = st.intentions[0]
    assert it.suspended and list(st.events) == [GoalAdded(t("inner"), 0)]
    _, selected = deliberate(st)                 # inner plan pushed on the same intention
    assert selected is it and not it.suspended and len(it.stack) == 2
    act(st, selected, env)                       # inner body done -> frame popped
    assert len(it.stack) == 1
    run_cycle(st, ExternalInput(), env)
    assert [c[1] for c in env.calls] == ["moveTo", "hover"]
    assert not st.intentions


def test_unknown_action_fails_intention():
    spec = AgentSpec("a", goals=(t("g"),), plans=(Plan(on_goal(t("g")), body=[Act("fly")]),))
    st = fresh(spec)
    run_cycle(st, ExternalInput(), RecordingEnvironment(actions=()))
    assert not st.intentions
    assert list(st.events) == [GoalFailed(t("g"))]


def test_empty_agent_cycle_is_noop():
    st = fresh(AgentSpec("a"))
    env = RecordingEnvironment()
    run_cycle(st, ExternalInput(), env)
    assert not st.events and not st.intentions and len(st.beliefs) == 0
    assert env.calls == []


def test_context_query_absent_and_bind():
    seen = []
    spec = (AgentSpecBuilder("a").belief(t("at", 2)).goal(t("g"))
            .plan(on_goal(t("g")),
                  [Query(t("at", Var("X"))), Absent(t("blocked")), Bind("Y", lambda s: s["X"] * 10),
                   Guard(lambda s: seen.append(s["Y"]) or True)],
                  [Act("moveTo", (Var("X"), Var("Y")))])
            .build())
    st = fresh(spec)
    env = RecordingEnvironment()
    for _ in range(3):
        run_cycle(st, ExternalInput(), env)
    assert seen == [20.0]
    assert env.calls[-1] == ("act", "moveTo", t("x", 2, 20).args)


def test_unhandled_belief_events_are_discarded():
    spec = AgentSpec("a", plans=(Plan(on_added(t("ping")), body=[Act("hover")]),))
    st = fresh(spec, trace=True)
    sense(st, ExternalInput(frozenset({t("noise", 1), t("ping")})))
    _, it = deliberate(st)
    assert it is not None and not st.events
    assert ("discard", "+noise(1)") in st.log


def test_drop_belief_raises_removal():
    spec = AgentSpec("a", beliefs=(t("x", 1),), goals=(t("g"),),
                     plans=(Plan(on_goal(t("g")), body=[DropBelief(t("x", Var("_")))]),))
    st = fresh(spec)
    st.events.popleft()
    run_cycle(st, ExternalInput(), RecordingEnvironment())
    assert len(st.beliefs) == 0 and str(st.events[-1]) == "-x(1)"


def test_broadcast_reaches_environment():
    spec = AgentSpec("a", goals=(t("g"),), plans=(Plan(on_goal(t("g")), body=[Broadcast(t("hi", 1))]),))
    env = RecordingEnvironment()
    run_cycle(fresh(spec), ExternalInput(), env)
    assert env.calls[0][0] == "broadcast" and env.calls[0][1].payload == t("hi", 1)
