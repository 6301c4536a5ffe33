"""The UAV leader/follower formation scenario."""

from .agents import LEADER, follower_id, follower_spec, leader_spec, scenario_actions, slot_offset
from .config import ConfigError, ScenarioConfig
from .experiment import (
    Aggregate, RunResult, aggregate, raw_csv_text, run_experiment, run_single, steady_state_mean,
)
from .oracle import ErrorSample, formation_error, oracle_ideal_positions, slot_points
