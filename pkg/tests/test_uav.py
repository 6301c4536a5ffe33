import math

import numpy as np
import pytest

from bdisim.bdi import AgentState, ExternalInput, Message, run_cycle, t
from bdisim.kernel import RngStream, Simulator
from bdisim.sim import Device, SimEnvironment, build_simulation, slot_assignment
from bdisim.uav import (
    LEADER, ScenarioConfig, aggregate, follower_spec, formation_error, leader_spec, oracle_ideal_positions,
    run_experiment, run_single, scenario_actions, slot_offset,
)
from bdisim.uav.config import ConfigError


def world(cfg, positions):
    sim = Simulator()
    env = SimEnvironment(sim, RngStream(0, "env"), cfg.comm_range, cfg.max_speed, scenario_actions())
    for name, pos in positions.items():
        env.add_device(Device(f"uav/{name}", pos))
        env.place_agent(name, f"uav/{name}")
    return sim, env


def cycle(state, env, name):
    h = env.handle(name)
    return run_cycle(state, ExternalInput(h.perceive(), env.drain(name), env.sim.now), h)


def test_leader_speed_within_limit():
    cfg = ScenarioConfig()
    v = cfg.angular_speed * cfg.leader_radius
    assert v == pytest.approx(0.05236, abs=1e-5)
    assert v <= cfg.max_speed


def test_slot_targets():
    assert slot_offset(0, 16, 2.5) == (2.5, 0.0)
    x, y = slot_offset(1, 4, 2.5)
    assert x == pytest.approx(0.0, abs=1e-12) and y == pytest.approx(2.5)


def test_leader_first_cycle_waypoint_and_broadcast():
    cfg = ScenarioConfig(n_followers=1)
    sim, env = world(cfg, {LEADER: (0.0, 0.0), "follower0": (2.0, 0.0)})
    sim.run_until(0.4)
    leader = AgentState.from_spec(leader_spec(cfg), LEADER, trace=True)
    cycle(leader, env, LEADER)
    assert [k for k, _ in leader.log if k == "action"] == ["action"]
    invites = env.drain("follower0")
    assert len(invites) == 1 and invites[0].payload.functor == "invite"
    target = env.device_of(LEADER).movement.target
    angle = cfg.angular_speed * 0.4
    assert target == pytest.approx((5 * math.cos(angle), 5 * math.sin(angle)))


def test_join_requests_assigned_in_order():
    cfg = ScenarioConfig(n_followers=4)
    sim, env = world(cfg, {LEADER: (0.0, 0.0), "follower0": (1.0, 0.0), "follower1": (0.0, 1.0)})
    leader = AgentState.from_spec(leader_spec(cfg), LEADER, trace=True)
    for who in ("follower1", "follower0"):
        env.deliver(LEADER, Message(who, t("join", who, 0.0)))
    for _ in range(4):
        cycle(leader, env, LEADER)
    slots = {f: [m.payload for m in env.drain(f) if m.payload.functor == "slot"] for f in ("follower0", "follower1")}
    assert slots == {"follower1": [t("slot", 0, 4)], "follower0": [t("slot", 1, 4)]}


def test_follower_joins_then_moves_to_slot():
    cfg = ScenarioConfig(n_followers=4)
    sim, env = world(cfg, {LEADER: (0.0, 0.0), "follower0": (1.0, 1.0)})
    f = AgentState.from_spec(follower_spec(cfg), "follower0", trace=True)
    env.deliver("follower0", Message(LEADER, t("invite", LEADER, 0.0, 0.0, 0, 0.0)))
    cycle(f, env, "follower0")
    assert [e for e in f.log if e[0] == "plan"] == [("plan", "request_slot")]
    assert [m.payload for m in env.drain(LEADER)] == [t("join", "follower0", 0.0)]
    env.deliver("follower0", Message(LEADER, t("slot", 1, 4)))
    f.log.clear()
    cycle(f, env, "follower0")
    assert [v for k, v in f.log if k == "plan"] == ["take_slot"]
    assert env.device_of("follower0").movement.target == pytest.approx((0.0, 2.5))


def test_follower_never_in_range_never_moves():
    cfg = ScenarioConfig(n_followers=1, duration=120.0)
    s = build_simulation(cfg, 0)
    far = (9.9, 0.0)
    s.env.device_of("follower0").anchor = far
    s.run(60.0)
    assert s.env.position_of("follower0") == far


def test_oracle_zero_at_ideal_and_half_for_offsets():
    cfg = ScenarioConfig(n_followers=4)
    ideal = oracle_ideal_positions((1.0, 1.0), {"a": 0, "b": 2}, cfg)
    assert formation_error((1.0, 1.0), ideal, {"a": 0, "b": 2}, cfg) == 0.0
    off = {"a": (ideal["a"][0] + 0.5, ideal["a"][1]), "b": (ideal["b"][0], ideal["b"][1] - 0.5)}
    assert formation_error((1.0, 1.0), off, {"a": 0, "b": 2}, cfg) == pytest.approx(0.5)


def test_unassigned_follower_uses_nearest_unclaimed_slot():
    cfg = ScenarioConfig(n_followers=4)
    ideal = oracle_ideal_positions((0.0, 0.0), {"a": 0}, cfg, positions={"a": (2.5, 0.0), "b": (3.0, 0.1)})
    assert ideal["b"] != ideal["a"]
    assert ideal["b"] == pytest.approx((0.0, 2.5), abs=1e-12)


def test_optimal_matching_never_worse():
    cfg = ScenarioConfig(n_followers=3)
    pos = {"a": (2.0, 1.0), "b": (-1.0, 2.0), "c": (0.0, -3.0)}
    opt = formation_error((0, 0), pos, {}, cfg.with_(slot_matching="optimal"))
    greedy = formation_error((0, 0), pos, {}, cfg)
    assert opt <= greedy + 1e-12


def test_error_grows_as_leader_leaves_static_followers():
    cfg = ScenarioConfig(n_followers=4)
    pos = {f"f{k}": p for k, p in enumerate(
        [(2.5, 0.0), (0.0, 2.5), (-2.5, 0.0), (0.0, -2.5)])}
    assign = {f"f{k}": k for k in range(4)}
    errs = [formation_error((d, 0.0), pos, assign, cfg) for d in (0.0, 0.5, 1.0, 2.0)]
    assert errs[0] == pytest.approx(0.0, abs=1e-12)
    assert all(a < b for a, b in zip(errs, errs[1:]))


def test_no_followers_gives_zero_series():
    r = run_single(ScenarioConfig(n_followers=0, duration=30.0), 1)
    assert len(r.samples) == 31 and all(s.value == 0 for s in r.samples)


def test_slots_are_injective():
    s = build_simulation(ScenarioConfig(n_followers=8, duration=600.0), 2)
    for stop in (150.0, 300.0, 600.0):
        s.run(stop)
        assign = slot_assignment(r.state for n, r in s.runners.items() if n != LEADER)
        assert len(set(assign.values())) == len(assign)
        assert all(0 <= k < 8 for k in assign.values())


def test_error_non_negative_and_converges():
    r = run_single(ScenarioConfig(n_followers=6, duration=600.0, granularity="ama"), 0)
    v = r.values
    assert (v >= 0).all()
    assert v[-100:].mean() < v[:10].mean()


def test_repeated_seeds_give_identical_aggregates():
    cfg = ScenarioConfig(n_followers=3, duration=60.0)
    _, a = run_experiment(cfg, [0, 1])
    _, b = run_experiment(cfg, [0, 1])
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.std, b.std)
    with pytest.raises(ValueError):
        run_experiment(cfg, [0, 0])


def test_aggregate_buckets_by_time():
    cfg = ScenarioConfig(n_followers=2, duration=10.0)
    runs = [run_single(cfg, s) for s in (0, 1)]
    agg = aggregate(runs)
    assert list(agg.t) == [float(k) for k in range(11)]
    assert agg.mean[3] == pytest.approx((runs[0].values[3] + runs[1].values[3]) / 2)


def test_invalid_config_lists_every_problem():
    with pytest.raises(ConfigError) as info:
        ScenarioConfig(n_followers=-1, comm_range=0, drift=-0.1)
    assert len(info.value.errors) == 3
