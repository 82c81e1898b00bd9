"""Scenario file parsing and validation."""

import math

import pytest
import yaml

from exobench._data import data_path
from exobench.bench.scenario import EXPERIMENTS, load_scenario, scenario_from_dict
from exobench.errors import ConfigurationError, SchemaError, UnitError

_SPEC_YAML = """
label: unit-under-test
motor:
  R: 0.58 ohm
  L: 0.21 mH
  k_t: 0.2886 Nm/A
  b_m: 0.08 Nm*s/rad
  J_m: 895 g*cm^2
  V_max: 42 V
  i_nominal: 7.5 A
transmission:
  n: 8
  k_c: 500 Nm/rad
  b_c: 0.01 Nm*s/rad
"""


def test_backdrive_defaults():
    sc = scenario_from_dict({"experiment": "backdrive"})
    assert sc.experiment == "backdrive"
    assert sc.params["f0"] == 0.0
    assert sc.params["f1"] == 1.0
    assert sc.params["amplitude"] == pytest.approx(math.radians(10.0))
    assert sc.params["duration"] == 160.0
    assert sc.params["dt"] is None
    assert sc.spec_names == ["conventional", "sea", "qdd"]
    assert [s.label for s in sc.specs] == ["conventional", "sea", "qdd"]
    assert sc.seed is None
    assert sc.gains_override is None


def test_track_defaults():
    sc = scenario_from_dict({"experiment": "track"})
    p = sc.params
    assert p["profile"] == "walking"
    assert p["cadence"] == 1.2
    assert p["duration"] == 10.0
    assert p["noise_std"] == 0.01
    assert p["model"] is None
    assert p["train_cadences"] == [1.4, 1.2, 0.85]
    assert p["holdout_cadence"] == 1.0
    assert p["train_duration"] == 60.0
    assert p["epochs"] == 200
    assert p["batch_size"] == 64
    assert p["learning_rate"] == 1e-3
    assert sc.spec_names == ["qdd"]


def test_units_resolved_to_si():
    sc = scenario_from_dict({
        "experiment": "backdrive",
        "duration": "40 s",
        "amplitude": "10 deg",
        "f1": "0.5 Hz",
    })
    assert sc.params["duration"] == 40.0
    assert sc.params["amplitude"] == pytest.approx(math.radians(10.0))
    assert sc.params["f1"] == 0.5


def test_unknown_key_rejected():
    with pytest.raises(SchemaError, match=r"'bogus_key'.*'backdrive'"):
        scenario_from_dict({"experiment": "backdrive", "bogus_key": 1})


def test_bare_number_for_dimensional_key():
    with pytest.raises(UnitError, match="duration"):
        scenario_from_dict({"experiment": "backdrive", "duration": 40})


def test_int_kind_rejects_bool():
    with pytest.raises(SchemaError, match="points"):
        scenario_from_dict({"experiment": "bandwidth", "points": True})


def test_list_kinds():
    sc = scenario_from_dict({
        "experiment": "track",
        "train_cadences": ["1.4 s", "1.2 s"],
        "noise_std": 0.05,
    })
    assert sc.params["train_cadences"] == [1.4, 1.2]
    assert sc.params["noise_std"] == 0.05
    with pytest.raises(UnitError, match=r"train_cadences\[1\]"):
        scenario_from_dict({"experiment": "track",
                            "train_cadences": ["1.4 s", 1.2]})
    with pytest.raises(SchemaError, match="expected a list"):
        scenario_from_dict({"experiment": "track", "train_cadences": "1.4 s"})


def test_spec_count_rules():
    with pytest.raises(SchemaError, match="at least two"):
        scenario_from_dict({"experiment": "benchmark", "specs": ["qdd"]})
    with pytest.raises(SchemaError, match="exactly one"):
        scenario_from_dict({"experiment": "track", "specs": ["qdd", "sea"]})
    with pytest.raises(SchemaError, match="'specs'"):
        scenario_from_dict({"experiment": "tf", "specs": "qdd"})


def test_seed_validation():
    sc = scenario_from_dict({"experiment": "tf", "seed": 7})
    assert sc.seed == 7
    with pytest.raises(SchemaError, match="non-negative"):
        scenario_from_dict({"experiment": "tf", "seed": -1})
    with pytest.raises(SchemaError, match="integer"):
        scenario_from_dict({"experiment": "tf", "seed": 1.5})


def test_experiment_key_required_and_known():
    with pytest.raises(SchemaError, match="missing the required key"):
        scenario_from_dict({"specs": ["qdd"]})
    with pytest.raises(SchemaError, match="unknown experiment"):
        scenario_from_dict({"experiment": "hover"})
    with pytest.raises(SchemaError, match="mapping"):
        scenario_from_dict(["experiment", "tf"])


def test_spec_resolution(tmp_path):
    (tmp_path / "custom.yaml").write_text(_SPEC_YAML)
    scenario = tmp_path / "scenario.yaml"
    scenario.write_text("experiment: tf\nspecs: [custom.yaml, qdd]\n")
    sc = load_scenario(str(scenario))
    assert [s.label for s in sc.specs] == ["unit-under-test", "qdd"]
    with pytest.raises(ConfigurationError, match="neither a preset"):
        scenario_from_dict({"experiment": "tf", "specs": ["hydraulic"]},
                           base_dir=str(tmp_path))


def test_gains_file(tmp_path):
    gains = tmp_path / "gains.yaml"
    gains.write_text("kp: 12.5 V/Nm\nki: 200 V/(Nm*s)\n"
                     "feedforward: 0.25 V/Nm\nintegrator_limit: 42 V\n")
    sc = scenario_from_dict({"experiment": "bandwidth", "gains": "gains.yaml"},
                            base_dir=str(tmp_path))
    g = sc.gains_override
    assert g.kp == 12.5
    assert g.ki == 200.0
    assert g.feedforward == 0.25
    assert g.integrator_limit == 42.0


def test_gains_file_optional_keys_default(tmp_path):
    gains = tmp_path / "gains.yaml"
    gains.write_text("kp: 12.5 V/Nm\nki: 200 V/Nm/s\n")
    sc = scenario_from_dict({"experiment": "bandwidth", "gains": "gains.yaml"},
                            base_dir=str(tmp_path))
    assert sc.gains_override.feedforward == 0.0
    assert sc.gains_override.integrator_limit == math.inf


def test_gains_file_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("kp: 12.5 V/Nm\nki: 200 V/(Nm*s)\nkd: 1 V/Nm\n")
    with pytest.raises(SchemaError, match="kd"):
        scenario_from_dict({"experiment": "bandwidth", "gains": "bad.yaml"},
                           base_dir=str(tmp_path))
    nokp = tmp_path / "nokp.yaml"
    nokp.write_text("ki: 200 V/(Nm*s)\n")
    with pytest.raises(SchemaError, match="kp"):
        scenario_from_dict({"experiment": "bandwidth", "gains": "nokp.yaml"},
                           base_dir=str(tmp_path))
    with pytest.raises(ConfigurationError, match="does not exist"):
        scenario_from_dict({"experiment": "bandwidth", "gains": "missing.yaml"},
                           base_dir=str(tmp_path))


def test_shipped_scenarios_load():
    for name in EXPERIMENTS:
        sc = load_scenario(data_path("scenarios", f"{name}.yaml"))
        assert sc.experiment == name
        assert sc.path is not None


def test_raw_preserved_for_hashing():
    raw = {"experiment": "backdrive", "duration": "40 s"}
    sc = scenario_from_dict(dict(raw))
    assert sc.raw == raw
