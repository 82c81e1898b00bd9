"""Scenario files: validated, unit-suffixed experiment descriptions.

A scenario is a flat YAML mapping.  Every key is declared in the schema for
its experiment; unknown keys are rejected by name, dimensional quantities
must carry a unit suffix, and everything is resolved to SI on load.
"""

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import yaml

from ..actuator.params import ActuatorSpec, PRESET_LABELS, load_spec
from ..control.torque_loop import PiGains
from ..errors import ConfigurationError, SchemaError
from ..units import parse_quantity

EXPERIMENTS = ("bandwidth", "backdrive", "benchmark", "track", "train-gait", "tf")

# value kinds: "int" | "float" | "str" | a UNIT_TABLES dimension |
# "list:<kind>" applied element-wise
_COMMON_SCHEMA = {
    "experiment": "str",
    "specs": "list:str",
    "seed": "int",
    "gains": "str",
}

_SCHEMAS: Dict[str, Dict[str, str]] = {
    "bandwidth": {
        "freq_min": "frequency",
        "freq_max": "frequency",
        "points": "int",
        "amplitudes": "list:torque",
        "settle_cycles": "int",
        "measure_cycles": "int",
        "settle_time": "time",
    },
    "backdrive": {
        "f0": "frequency",
        "f1": "frequency",
        "amplitude": "angle",
        "duration": "time",
        "dt": "time",
    },
    "benchmark": {
        "bandwidth_freq_min": "frequency",
        "bandwidth_freq_max": "frequency",
        "bandwidth_points": "int",
        "bandwidth_amplitude": "torque",
        "settle_cycles": "int",
        "measure_cycles": "int",
        "settle_time": "time",
        "backdrive_f0": "frequency",
        "backdrive_f1": "frequency",
        "backdrive_amplitude": "angle",
        "backdrive_duration": "time",
    },
    "track": {
        "profile": "str",
        "cadence": "time",
        "duration": "time",
        "noise_std": "float",
        "model": "str",
        "train_cadences": "list:time",
        "holdout_cadence": "time",
        "train_duration": "time",
        "epochs": "int",
        "batch_size": "int",
        "learning_rate": "float",
    },
    "train-gait": {
        "train_cadences": "list:time",
        "holdout_cadence": "time",
        "duration": "time",
        "noise_std": "float",
        "epochs": "int",
        "batch_size": "int",
        "learning_rate": "float",
        "model_name": "str",
    },
    "tf": {},
}

_DEFAULTS: Dict[str, Dict[str, object]] = {
    "bandwidth": {
        "freq_min": 0.5, "freq_max": 100.0, "points": 40,
        "amplitudes": [5.0], "settle_cycles": 3, "measure_cycles": 5,
        "settle_time": 0.3,
    },
    "backdrive": {
        "f0": 0.0, "f1": 1.0, "amplitude": 0.17453292519943295,  # 10 deg
        "duration": 160.0, "dt": None,
    },
    "benchmark": {
        "bandwidth_freq_min": 1.0, "bandwidth_freq_max": 500.0,
        "bandwidth_points": 40, "bandwidth_amplitude": 5.0,
        "settle_cycles": 3, "measure_cycles": 5, "settle_time": 0.3,
        "backdrive_f0": 0.0, "backdrive_f1": 1.0,
        "backdrive_amplitude": 0.17453292519943295,
        "backdrive_duration": 160.0,
    },
    "track": {
        "profile": "walking", "cadence": 1.2, "duration": 10.0,
        "noise_std": 0.01, "model": None,
        "train_cadences": [1.4, 1.2, 0.85], "holdout_cadence": 1.0,
        "train_duration": 60.0, "epochs": 200, "batch_size": 64,
        "learning_rate": 1e-3,
    },
    "train-gait": {
        "train_cadences": [1.4, 1.2, 0.85], "holdout_cadence": 1.0,
        "duration": 60.0, "noise_std": 0.01, "epochs": 200,
        "batch_size": 64, "learning_rate": 1e-3,
        "model_name": "phase-model.txt",
    },
    "tf": {},
}

_DEFAULT_SPECS = {
    "bandwidth": ["qdd"],
    "backdrive": ["conventional", "sea", "qdd"],
    "benchmark": ["conventional", "sea", "qdd"],
    "track": ["qdd"],
    "train-gait": [],
    "tf": ["conventional", "sea", "qdd"],
}


@dataclass
class Scenario:
    """A fully validated experiment description with SI-resolved parameters."""

    experiment: str
    path: Optional[str]
    specs: List[ActuatorSpec]
    params: Dict[str, object]
    raw: Dict[str, object]
    seed: Optional[int] = None
    gains_override: Optional[PiGains] = None
    spec_names: List[str] = field(default_factory=list)


def _parse_kind(kind: str, raw, key: str):
    if kind.startswith("list:"):
        inner = kind[len("list:"):]
        if not isinstance(raw, (list, tuple)):
            raise SchemaError(f"{key}: expected a list, got {type(raw).__name__}")
        return [_parse_kind(inner, item, f"{key}[{i}]") for i, item in enumerate(raw)]
    if kind == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise SchemaError(f"{key}: expected an integer, got {raw!r}")
        return raw
    if kind == "str":
        if not isinstance(raw, str):
            raise SchemaError(f"{key}: expected a string, got {raw!r}")
        return raw
    if kind == "float":
        return parse_quantity(raw, None, key)
    return parse_quantity(raw, kind, key)


def _resolve_spec(name: str, base_dir: str) -> ActuatorSpec:
    if name in PRESET_LABELS:
        return load_spec(name)
    path = name
    if not os.path.isabs(path):
        candidate = os.path.join(base_dir, path)
        if os.path.exists(candidate):
            path = candidate
    if not os.path.exists(path):
        raise ConfigurationError(f"actuator spec {name!r} is neither a preset "
                                 f"({', '.join(PRESET_LABELS)}) nor an existing file")
    return load_spec(path)


def _load_gains_file(path: str) -> PiGains:
    with open(path, "r") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"gains file {path} must hold a mapping")
    dims = {"kp": "proportional_gain", "ki": "integral_gain",
            "feedforward": "proportional_gain", "integrator_limit": "voltage"}
    for key in raw:
        if key not in dims:
            raise SchemaError(f"gains file {path}: unknown key {key!r}")
    for req in ("kp", "ki"):
        if req not in raw:
            raise SchemaError(f"gains file {path}: missing required key {req!r}")
    vals = {k: parse_quantity(v, dims[k], k) for k, v in raw.items()}
    return PiGains(kp=vals["kp"], ki=vals["ki"],
                   feedforward=vals.get("feedforward", 0.0),
                   integrator_limit=vals.get("integrator_limit", float("inf")))


def scenario_from_dict(raw: Dict[str, object], base_dir: str = ".",
                       path: Optional[str] = None) -> Scenario:
    if not isinstance(raw, dict):
        raise SchemaError("scenario file must hold a key-value mapping")
    if "experiment" not in raw:
        raise SchemaError("scenario is missing the required key 'experiment'")
    experiment = raw["experiment"]
    if experiment not in EXPERIMENTS:
        raise SchemaError(
            f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")

    schema = dict(_COMMON_SCHEMA)
    schema.update(_SCHEMAS[experiment])
    for key in raw:
        if key not in schema:
            raise SchemaError(f"unknown scenario key {key!r} for experiment "
                              f"{experiment!r}")

    params = dict(_DEFAULTS[experiment])
    for key, kind in _SCHEMAS[experiment].items():
        if key in raw:
            params[key] = _parse_kind(kind, raw[key], key)

    spec_names = raw.get("specs", _DEFAULT_SPECS[experiment])
    if not isinstance(spec_names, (list, tuple)) or \
            not all(isinstance(s, str) for s in spec_names):
        raise SchemaError("'specs' must be a list of preset names or file paths")
    specs = [_resolve_spec(name, base_dir) for name in spec_names]
    if experiment == "benchmark" and len(specs) < 2:
        raise SchemaError("a benchmark scenario must list at least two specs")
    if experiment == "track" and len(specs) != 1:
        raise SchemaError("a track scenario must list exactly one spec")

    seed = None
    if "seed" in raw:
        seed = _parse_kind("int", raw["seed"], "seed")
        if seed < 0:
            raise SchemaError("seed must be non-negative")

    gains_override = None
    if "gains" in raw:
        gpath = _parse_kind("str", raw["gains"], "gains")
        if not os.path.isabs(gpath):
            gpath = os.path.join(base_dir, gpath)
        if not os.path.exists(gpath):
            raise ConfigurationError(f"gains file {gpath} does not exist")
        gains_override = _load_gains_file(gpath)

    return Scenario(experiment=experiment, path=path, specs=specs,
                    params=params, raw=dict(raw), seed=seed,
                    gains_override=gains_override,
                    spec_names=list(spec_names))


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario file; all quantities resolved to SI."""
    with open(path, "r") as fh:
        raw = yaml.safe_load(fh)
    return scenario_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)),
                              path=path)
