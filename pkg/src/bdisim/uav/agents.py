"""Leader and follower agent programs.

The leader pursues one recurring goal, ``move``: each iteration it flies to
the next waypoint on its circle and invites nearby UAVs. Followers have no
goal of their own. They ask to join when invited, receive a slot index, and
from then on fly to their slot around the most recent leader position they
heard of. A follower whose last invite is stale stops where it is.
"""

from __future__ import annotations

import math

from ..bdi import (
    Absent, Act, AgentSpec, AgentSpecBuilder, Bind, Guard, Message, Query, Send,
    SubGoal, Var, on_added, on_goal, t,
)
from ..bdi.terms import Number, to_python
from ..env import EnvironmentHandle, numeric_args
from .config import ScenarioConfig

__all__ = ["LEADER", "follower_id", "leader_spec", "follower_spec", "scenario_actions",
           "waypoint_action", "slot_offset"]

LEADER = "leader"

L, X, Y, WX, WY, C, T, K, N, F, Me, TX, TY, LX, LY = (Var(n) for n in
    ("L", "X", "Y", "WX", "WY", "C", "T", "K", "N", "F", "Me", "TX", "TY", "LX", "LY"))
_ = Var("_")


def follower_id(i: int) -> str:
    return f"follower{i}"


def slot_offset(k: int, n: int, radius: float) -> tuple[float, float]:
    theta = 2 * math.pi * k / n
    return radius * math.cos(theta), radius * math.sin(theta)


def waypoint_action(handle: EnvironmentHandle, args: tuple) -> None:
    """``waypoint(X, Y, Invite)``: head for (X, Y) and broadcast ``Invite``."""
    if len(args) != 3:
        raise ValueError(f"waypoint expects 3 arguments, got {len(args)}")
    x, y = numeric_args("waypoint", args[:2], 2)
    handle.act("moveTo", (Number(x), Number(y)))
    handle.broadcast(Message(handle.agent, args[2]))


def scenario_actions() -> dict:
    return {"waypoint": waypoint_action}


def _rank(s, who: str) -> int:
    # a variable name not used by the plan, so the query sees every join
    joined = [to_python(sol["Joiner"]) for sol in s.solutions(t("join", Var("Joiner"), _))]
    return joined.index(who)


def leader_spec(cfg: ScenarioConfig) -> AgentSpec:
    omega, r_l = cfg.angular_speed, cfg.leader_radius
    n = cfg.n_followers
    b = AgentSpecBuilder(LEADER).goal(t("move"))
    # The waypoint angle advances by omega * dt per iteration, i.e. it is omega * now.
    b.plan(on_goal(t("move")),
           context=[Query(t("self", L)), Query(t("pos", X, Y)),
                    Bind("WX", lambda s: r_l * math.cos(omega * s.now)),
                    Bind("WY", lambda s: r_l * math.sin(omega * s.now)),
                    Bind("C", lambda s: s.count(t("join", _, _))),
                    Bind("T", lambda s: s.now)],
           body=[Act("waypoint", (WX, WY, t("invite", L, X, Y, C, T))), SubGoal(t("move"))],
           name="move")
    b.plan(on_added(t("join", F, _)),
           context=[Bind("K", lambda s: _rank(s, s["F"]))],
           body=[Send(F, t("slot", K, n))],
           name="assign_slot")
    return b.build()


def follower_spec(cfg: ScenarioConfig) -> AgentSpec:
    r_f, horizon = cfg.formation_radius, cfg.stale_after

    def target(axis):
        def fn(s):
            offset = slot_offset(int(s["K"]), int(s["N"]), r_f)[axis]
            return (s["LX"], s["LY"])[axis] + offset
        return fn

    b = AgentSpecBuilder("follower")
    b.plan(on_added(t("invite", L, LX, LY, C, T)),
           context=[Absent(t("slot", _, _)), Query(t("self", Me))],
           body=[Send(L, t("join", Me, T))],
           name="request_slot")
    b.plan(on_added(t("invite", L, LX, LY, C, T)),
           context=[Query(t("slot", K, N)),
                    Bind("TX", target(0)),
                    Bind("TY", target(1))],
           body=[Act("moveTo", (TX, TY))],
           name="keep_formation")
    b.plan(on_added(t("slot", K, N)),
           context=[Query(t("invite", L, LX, LY, C, T)),
                    Bind("TX", target(0)),
                    Bind("TY", target(1))],
           body=[Act("moveTo", (TX, TY))],
           name="take_slot")
    b.plan(on_added(t("pos", _, _)),
           context=[Query(t("invite", _, _, _, _, T)), Guard(lambda s: s.now - s["T"] > horizon)],
           body=[Act("hover")],
           name="hover")
    return b.build()
