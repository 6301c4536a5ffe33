"""
The discrete-event kernel
=========================

A virtual clock, a future-event list and labelled random streams.
"""

from bdisim.kernel import CHAINED, RngStream, Simulator, fork_rng
from bdisim.timedist import DiracComb, Exponential, cycle_interval, next_occurrence, weibull_from_moments

###############################################################################
# Events fire in time order. At equal times the higher priority tier goes
# first, and within one tier insertion order is kept.

sim = Simulator(record_trace=True)
sim.schedule(1.0, lambda: None, label="normal A")
sim.schedule(1.0, lambda: None, label="normal B")
sim.schedule(1.0, lambda: None, label="chained", priority=CHAINED)
sim.schedule(0.5, lambda: None, label="early")
sim.run_until(2.0)
print("\n".join(sim.trace))

###############################################################################
# A periodic process is just a handler that schedules itself again.

ticks = []


def tick():
    ticks.append(sim.now)
    sim.schedule_in(1.0, tick)


sim.schedule(2.0, tick)
sim.run_until(5.5)
print("ticks:", ticks)

###############################################################################
# Randomness comes from named streams. The same seed and label always give
# the same numbers, whatever else the simulation draws.

root = RngStream(42)
print(fork_rng(root, "agent/leader").gen.random(3))
print(fork_rng(root, "agent/leader").gen.random(3))
print(fork_rng(root, "agent/follower0").gen.random(3))

###############################################################################
# Time distributions answer "when does this happen next?". A Dirac comb
# ticks on a fixed grid; an exponential delay is memoryless.

comb = DiracComb(0.3, 1.0)
print([next_occurrence(comb, t) for t in (0.0, 0.3, 2.0)])
rng = fork_rng(root, "demo")
print("exp(2) mean:", Exponential(2.0).sample_many(rng, 100_000).mean())

###############################################################################
# Drifting clocks: a Weibull with a requested mean and spread is solved
# numerically, and a cycle interval is the reciprocal of a drawn frequency.

w = weibull_from_moments(1.0, 0.5)
print(f"shape={w.shape:.4f} scale={w.scale:.4f} mean={w.mean:.4f} sd={w.std:.4f}")
d = cycle_interval(1.0, 0.5)
x = d.sample_many(rng, 100_000)
print(f"1 Hz, drift 0.5: mean interval {x.mean():.3f}s, median {sorted(x)[len(x) // 2]:.3f}s")
