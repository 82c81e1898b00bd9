"""Scenario-driven benchmark harness: experiments, reports, CLI."""

from .experiments import (
    REF_BACKDRIVE_NM,
    REF_BANDWIDTH_HZ,
    REF_TRACKING,
    cmd_backdrive,
    cmd_bandwidth,
    cmd_benchmark,
    cmd_tf,
    cmd_track,
    cmd_train_gait,
    run_experiment,
)
from .report import Cell, Report, computed, config_hash_of, reference
from .scenario import EXPERIMENTS, Scenario, load_scenario, scenario_from_dict

__all__ = [
    "EXPERIMENTS",
    "REF_BACKDRIVE_NM",
    "REF_BANDWIDTH_HZ",
    "REF_TRACKING",
    "Cell",
    "Report",
    "Scenario",
    "cmd_backdrive",
    "cmd_bandwidth",
    "cmd_benchmark",
    "cmd_tf",
    "cmd_track",
    "cmd_train_gait",
    "computed",
    "config_hash_of",
    "load_scenario",
    "reference",
    "run_experiment",
    "scenario_from_dict",
]
