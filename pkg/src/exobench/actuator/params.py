"""Actuation-unit parameter sets and preset loading.

Three presets ship with the package, one per drive paradigm:

* ``conventional`` -- small motor behind a high-ratio gearbox
* ``sea``          -- series-elastic actuator: motor, high ratio, soft spring
* ``qdd``          -- quasi-direct drive: large motor, low ratio, stiff output

Preset files are unit-suffixed YAML; everything is converted to SI at load
time and unknown keys are rejected.
"""

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import yaml

from .._data import data_path
from ..errors import InvalidArgumentError, SchemaError
from ..units import parse_quantity

PRESET_LABELS = ("conventional", "sea", "qdd")

# fraction by which a separately supplied nominal torque may deviate from
# k_t * i_nominal before the spec is rejected as inconsistent
NOMINAL_TORQUE_RTOL = 0.02


@dataclass(frozen=True)
class MotorParams:
    """Electrical and rotor-side constants (SI).

    R          -- winding resistance [ohm]
    L          -- winding inductance [H]
    k_t        -- torque constant [Nm/A]
    k_b        -- back-EMF constant [V*s/rad]; defaults to k_t (ideal machine)
    b_m        -- rotor viscous damping [Nm*s/rad]
    J_m        -- rotor inertia [kg*m^2]
    V_max      -- supply voltage bound for the hard clamp [V]
    i_nominal  -- rated continuous current [A]
    """

    R: float
    L: float
    k_t: float
    b_m: float
    J_m: float
    V_max: float
    i_nominal: float
    k_b: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.k_b is None:
            object.__setattr__(self, "k_b", self.k_t)
        for name in ("R", "k_t", "J_m", "V_max", "i_nominal"):
            if getattr(self, name) <= 0.0:
                raise InvalidArgumentError(f"motor {name} must be positive")
        for name in ("L", "b_m", "k_b"):
            if getattr(self, name) < 0.0:
                raise InvalidArgumentError(f"motor {name} must be non-negative")

    @property
    def tau_nominal(self) -> float:
        """Rated continuous torque [Nm], k_t * i_nominal."""
        return self.k_t * self.i_nominal


@dataclass(frozen=True)
class TransmissionParams:
    """Gearbox ratio and the compliant output coupling (SI).

    n    -- gear ratio, dimensionless (motor turns per output turn)
    k_c  -- coupling stiffness [Nm/rad]
    b_c  -- coupling damping [Nm*s/rad]
    """

    n: float
    k_c: float
    b_c: float

    def __post_init__(self):
        if self.n <= 0.0 or self.k_c <= 0.0:
            raise InvalidArgumentError("gear ratio and coupling stiffness must be positive")
        if self.b_c < 0.0:
            raise InvalidArgumentError("coupling damping must be non-negative")


@dataclass(frozen=True)
class HumanParams:
    """Output-side (limb) model.

    J_h           -- limb inertia about the hip [kg*m^2]
    tau_l         -- exogenous muscle torque as a function of time [Nm],
                     used by the coupled mode
    theta_h       -- prescribed hip trajectory [rad] as a function of time,
                     used by the prescribed-motion mode
    theta_h_rate  -- analytic time derivative of theta_h [rad/s]
    """

    J_h: float = 1.0
    tau_l: Optional[Callable[[float], float]] = None
    theta_h: Optional[Callable[[float], float]] = None
    theta_h_rate: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.J_h <= 0.0:
            raise InvalidArgumentError("limb inertia J_h must be positive")
        if (self.theta_h is None) != (self.theta_h_rate is None):
            raise InvalidArgumentError(
                "prescribed theta_h requires its analytic rate (and vice versa)"
            )


@dataclass(frozen=True)
class ActuatorSpec:
    """One actuation unit: motor + transmission, plus optional tuned gains.

    ``control`` holds SI controller constants (kp, ki, feedforward, ...) as
    read from the spec file; the torque-loop module turns them into typed
    gains.
    """

    label: str
    motor: MotorParams
    transmission: TransmissionParams
    control: Optional[dict] = field(default=None, compare=False)


_MOTOR_FIELDS = {
    "R": "resistance",
    "L": "inductance",
    "k_t": "torque_constant",
    "k_b": "back_emf",
    "b_m": "damping",
    "J_m": "inertia",
    "V_max": "voltage",
    "i_nominal": "current",
    "tau_nominal": "torque",
}
_TRANSMISSION_FIELDS = {"n": None, "k_c": "stiffness", "b_c": "damping"}
_CONTROL_FIELDS = {
    "kp": "proportional_gain",
    "ki": "integral_gain",
    "feedforward": "proportional_gain",
    "integrator_limit": "voltage",
}
_MOTOR_REQUIRED = ("R", "L", "k_t", "b_m", "J_m", "V_max", "i_nominal")
_TRANSMISSION_REQUIRED = ("n", "k_c", "b_c")


def _parse_section(raw, fields: dict, required, section: str) -> dict:
    if not isinstance(raw, dict):
        raise SchemaError(f"section '{section}' must be a mapping")
    out = {}
    for key, value in raw.items():
        if key not in fields:
            raise SchemaError(f"unknown key '{section}.{key}'")
        out[key] = parse_quantity(value, fields[key], key=f"{section}.{key}")
    for key in required:
        if key not in out:
            raise SchemaError(f"missing key '{section}.{key}'")
    return out


def spec_from_dict(raw: dict, origin: str = "<dict>") -> ActuatorSpec:
    """Validate a parsed spec mapping and convert it to SI dataclasses."""
    if not isinstance(raw, dict):
        raise SchemaError(f"{origin}: spec must be a mapping")
    allowed = {"label", "motor", "transmission", "control"}
    for key in raw:
        if key not in allowed:
            raise SchemaError(f"unknown key '{key}'")
    for key in ("label", "motor", "transmission"):
        if key not in raw:
            raise SchemaError(f"missing key '{key}'")
    if not isinstance(raw["label"], str) or not raw["label"]:
        raise SchemaError("label must be a non-empty string")

    motor_values = _parse_section(raw["motor"], _MOTOR_FIELDS, _MOTOR_REQUIRED, "motor")
    supplied_nominal = motor_values.pop("tau_nominal", None)
    motor = MotorParams(**motor_values)
    if supplied_nominal is not None:
        derived = motor.tau_nominal
        if abs(supplied_nominal - derived) > NOMINAL_TORQUE_RTOL * derived:
            raise SchemaError(
                f"motor.tau_nominal = {supplied_nominal:g} Nm disagrees with "
                f"k_t * i_nominal = {derived:g} Nm by more than "
                f"{NOMINAL_TORQUE_RTOL:.0%}"
            )

    transmission = TransmissionParams(
        **_parse_section(raw["transmission"], _TRANSMISSION_FIELDS,
                         _TRANSMISSION_REQUIRED, "transmission")
    )
    control = None
    if "control" in raw:
        control = _parse_section(raw["control"], _CONTROL_FIELDS, ("kp", "ki"), "control")
    return ActuatorSpec(label=raw["label"], motor=motor,
                        transmission=transmission, control=control)


def load_spec(name_or_path: str) -> ActuatorSpec:
    """Load an actuator spec from a preset name or a YAML file path."""
    path = name_or_path
    if name_or_path in PRESET_LABELS:
        path = data_path("presets", f"{name_or_path}.yaml")
    if not os.path.exists(path):
        raise SchemaError(f"actuator spec '{name_or_path}' not found")
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return spec_from_dict(raw, origin=path)
