import pytest

from bdisim.kernel import CHAINED, NORMAL, RngStream, SchedulingError, SimulationError, Simulator, fork_rng


def test_earlier_event_pops_first():
    sim = Simulator()
    out = []
    sim.schedule(1.0, lambda: out.append(1.0))
    sim.schedule(0.5, lambda: out.append(0.5))
    sim.run_until(2)
    assert out == [0.5, 1.0]


def test_fifo_tie_break():
    sim = Simulator()
    out = []
    sim.schedule(1.0, lambda: out.append("A"))
    sim.schedule(1.0, lambda: out.append("B"))
    sim.run_until(1)
    assert out == ["A", "B"]


def test_higher_priority_first_at_equal_time():
    sim = Simulator()
    out = []
    sim.schedule(1.0, lambda: out.append("normal"), priority=NORMAL)
    sim.schedule(1.0, lambda: out.append("chained"), priority=CHAINED)
    sim.run_until(1)
    assert out == ["chained", "normal"]


def test_run_until_empty_advances_clock():
    sim = Simulator()
    assert sim.run_until(10) == 0
    assert sim.now == 10


def test_run_until_single_event():
    sim = Simulator()
    sim.schedule(5, lambda: None)
    assert sim.run_until(10) == 1
    assert sim.now == 10


def test_self_rescheduling_periodic():
    sim = Simulator()
    fired = []

    def tick():
        fired.append(sim.now)
        sim.schedule_in(1.0, tick)

    sim.schedule(0.0, tick)
    assert sim.run_until(3.5) == 4
    assert fired == [0.0, 1.0, 2.0, 3.0]


def test_past_scheduling_rejected():
    sim = Simulator()
    sim.run_until(5)
    with pytest.raises(SchedulingError):
        sim.schedule(4.0, lambda: None)
    with pytest.raises(SchedulingError):
        sim.schedule(float("nan"), lambda: None)


def test_cancel():
    sim = Simulator()
    out = []
    eid = sim.schedule(1, lambda: out.append(1))
    sim.schedule(2, lambda: out.append(2))
    sim.cancel(eid)
    assert sim.run_until(3) == 1
    assert out == [2]


def test_handler_error_names_event():
    sim = Simulator()
    sim.schedule(1, lambda: 1 / 0, label="boom")
    with pytest.raises(SimulationError) as info:
        sim.run_until(2)
    assert info.value.event.label == "boom"


def test_trace_records_time_and_label():
    sim = Simulator(record_trace=True)
    sim.schedule(0.25, lambda: None, label="x")
    sim.run_until(1)
    assert sim.trace == ["0.250000000 x"]


def test_fork_same_label_is_reproducible():
    a = fork_rng(RngStream(42), "a").gen.random(100)
    b = fork_rng(RngStream(42), "a").gen.random(100)
    assert (a == b).all()


def test_fork_labels_and_seeds_differ():
    a = fork_rng(RngStream(42), "a").gen.random(100)
    b = fork_rng(RngStream(42), "b").gen.random(100)
    c = fork_rng(RngStream(1), "a").gen.random(100)
    d = fork_rng(RngStream(2), "a").gen.random(100)
    assert (a != b).any()
    assert (c != d).any()


def test_fork_requires_label():
    with pytest.raises(ValueError):
        fork_rng(RngStream(0), "")
    with pytest.raises(ValueError):
        RngStream(-1)
