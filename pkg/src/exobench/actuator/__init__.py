"""Drive parameterisation, frequency-domain analysis and time-domain plant."""

from .analysis import (
    LIMIT_CASES,
    DerivedParams,
    derived_params,
    g1_tf,
    g2_tf,
    limit_case_tf,
    output_impedance,
)
from .params import (
    NOMINAL_TORQUE_RTOL,
    PRESET_LABELS,
    ActuatorSpec,
    HumanParams,
    MotorParams,
    TransmissionParams,
    load_spec,
    spec_from_dict,
)
from .plant import (
    MODES,
    BackdriveResult,
    Plant,
    backdrive_peak,
    build_plant,
)

__all__ = [
    "LIMIT_CASES",
    "MODES",
    "NOMINAL_TORQUE_RTOL",
    "PRESET_LABELS",
    "ActuatorSpec",
    "BackdriveResult",
    "DerivedParams",
    "HumanParams",
    "MotorParams",
    "Plant",
    "TransmissionParams",
    "backdrive_peak",
    "build_plant",
    "derived_params",
    "g1_tf",
    "g2_tf",
    "limit_case_tf",
    "load_spec",
    "output_impedance",
    "spec_from_dict",
]
