"""Discrete-event backend: devices in the plane and phase scheduling."""

from .builder import Simulation, build_simulation, place_followers, slot_assignment
from .environment import Device, SimEnvironment, SimHandle, apply_move_to
from .kinematics import MovementState, arrival_time, distance, position_at
from .scheduler import (
    ACLI, ACLP, AMA, AgentRunner, GranularityMode, Phase, PhaseScheduler, granularity_mode,
    schedule_phase,
)
