"""Torque loop, assistance profiles and gait-phase estimation."""

from .gait import (
    HIP_MAX_DEG,
    HIP_MIN_DEG,
    N_CHANNELS,
    SAMPLE_RATE_HZ,
    WINDOW_HOP,
    WINDOW_SAMPLES,
    GaitDataset,
    GaitRecord,
    circular_r2,
    hip_angle,
    hip_angle_d1,
    hip_angle_d2,
    phase_error_pct,
    phase_targets,
    synthesize_gait,
    windows_from_record,
)
from .mlp import (
    HIDDEN_UNITS,
    PhaseEstimator,
    gradient_check,
    mlp_forward,
    mlp_gradients,
    mlp_init,
    mlp_loss,
    mlp_train,
)
from .profile import (
    PROFILE_NAMES,
    TorqueProfile,
    load_profile,
    squatting_profile,
    walking_profile,
)
from .torque_loop import (
    PiGains,
    closed_loop_tf,
    crossover_frequency,
    gains_from_spec,
    loop_phase_deg,
    phase_margin_deg,
    pi_step,
    tune_gains,
)

__all__ = [
    "HIDDEN_UNITS",
    "HIP_MAX_DEG",
    "HIP_MIN_DEG",
    "N_CHANNELS",
    "PROFILE_NAMES",
    "SAMPLE_RATE_HZ",
    "WINDOW_HOP",
    "WINDOW_SAMPLES",
    "GaitDataset",
    "GaitRecord",
    "PhaseEstimator",
    "PiGains",
    "TorqueProfile",
    "circular_r2",
    "closed_loop_tf",
    "crossover_frequency",
    "gains_from_spec",
    "gradient_check",
    "hip_angle",
    "hip_angle_d1",
    "hip_angle_d2",
    "load_profile",
    "loop_phase_deg",
    "mlp_forward",
    "mlp_gradients",
    "mlp_init",
    "mlp_loss",
    "mlp_train",
    "phase_error_pct",
    "phase_margin_deg",
    "phase_targets",
    "pi_step",
    "squatting_profile",
    "synthesize_gait",
    "tune_gains",
    "walking_profile",
]
