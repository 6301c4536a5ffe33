"""
Running the same agents live
============================

Agent programs are backend-agnostic: the specs used in simulation run
unchanged as threads against wall-clock time.
"""

from bdisim.live import LiveConfig, rolling_average, run_live
from bdisim.sim import build_simulation
from bdisim.uav import ScenarioConfig, follower_spec, leader_spec

###############################################################################
# Three followers in a small arena. The leader leaves the centre for its
# circle straight away, so followers only join when it passes within radio
# range; over half a minute the error mostly reflects who has been reached.

cfg = ScenarioConfig(n_followers=3, arena_radius=6.0)
specs = (leader_spec(cfg), follower_spec(cfg))

###############################################################################
# Simulated: deterministic for a given seed.

sim = build_simulation(cfg.with_(duration=30.0), seed=7, specs=specs)
print("simulated:", [round(s.value, 2) for s in sim.run()][::5])

###############################################################################
# Live: the agents cycle as fast as the host allows (or at ``cycle_hint``
# Hz), while a mover thread integrates positions every ``tick_ms``.

samples = run_live(specs, cfg, LiveConfig(duration=30.0, tick_ms=50), seed=7,
                   on_sample=lambda s: print(f"  t={s.t:4.0f}s error={s.value:7.2f}"))
smooth = rolling_average(samples, 10.0)
print("10 s rolling average at the end:", round(smooth[-1].value, 3))
