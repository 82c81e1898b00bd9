"""Report cells, provenance tagging, and canonical serialisation."""

import json
import os

import pytest

from exobench.bench.report import Cell, Report, computed, config_hash_of, reference
from exobench.errors import InvalidArgumentError


def test_cell_provenance_rules():
    ok = Cell(value=1.0, units="Hz", source="computed", config_hash="abc")
    assert ok.render() == "1"
    with pytest.raises(InvalidArgumentError, match="config hash"):
        Cell(value=1.0, units="Hz", source="computed")
    with pytest.raises(InvalidArgumentError, match="must not carry"):
        Cell(value=1.0, units="Hz", source="reference", config_hash="abc")
    with pytest.raises(InvalidArgumentError, match="unknown cell source"):
        Cell(value=1.0, units="Hz", source="measured")


def test_cell_render():
    assert computed(None, "Hz", "abc").render() == "-"
    assert computed(3.14159265, "Hz", "abc").render() == "3.14159"
    assert reference(2.88, "Nm").render() == "2.88 (ref)"


def test_helper_constructors():
    c = computed(5, "Nm", "hash0", method="stepped sine", note="locked output")
    assert c.value == 5.0
    assert isinstance(c.value, float)
    assert c.source == "computed"
    assert c.method == "stepped sine"
    r = reference(73.3, "Hz", note="catalog")
    assert r.source == "reference"
    assert r.config_hash is None
    obj = c.to_json_obj()
    assert obj == {"value": 5.0, "units": "Nm", "source": "computed",
                   "config_hash": "hash0", "method": "stepped sine",
                   "note": "locked output"}
    assert "config_hash" not in r.to_json_obj()


def test_config_hash_stability():
    payload = {"b": 2, "a": 1, "nested": {"x": [1, 2, 3]}}
    h1 = config_hash_of(payload)
    h2 = config_hash_of({"a": 1, "nested": {"x": [1, 2, 3]}, "b": 2})
    assert h1 == h2
    assert len(h1) == 12
    assert config_hash_of({"a": 1}) != config_hash_of({"a": 2})


def _sample_report():
    rep = Report(experiment="benchmark", config_hash="deadbeef0000", seed=0)
    rep.add_row("qdd", bandwidth_hz=computed(277.0, "Hz", "deadbeef0000"),
                backdrive_nm=computed(15.4, "Nm", "deadbeef0000"))
    rep.add_row("sea", bandwidth_hz=computed(8.96, "Hz", "deadbeef0000"),
                bandwidth_ref_hz=reference(73.3, "Hz"))
    rep.notes.append("highest closed-loop bandwidth: qdd")
    return rep


def test_row_columns_in_first_seen_order():
    rep = _sample_report()
    assert rep.columns == ["bandwidth_hz", "backdrive_nm", "bandwidth_ref_hz"]


def test_json_text_canonical():
    rep = _sample_report()
    text = rep.to_json_text()
    assert text == rep.to_json_text()
    assert text.endswith("\n")
    obj = json.loads(text)
    assert obj["experiment"] == "benchmark"
    assert obj["timestamp"] is None
    assert obj["rows"][0]["label"] == "qdd"
    assert obj["rows"][0]["cells"]["bandwidth_hz"]["source"] == "computed"
    assert obj["rows"][1]["cells"]["bandwidth_ref_hz"]["source"] == "reference"
    # canonical form: keys sorted at every level
    keys = list(obj)
    assert keys == sorted(keys)


def test_text_rendering():
    rep = _sample_report()
    text = rep.to_text()
    lines = text.splitlines()
    assert lines[0] == "experiment: benchmark"
    assert lines[1] == "config hash: deadbeef0000"
    assert "73.3 (ref)" in text
    assert "note: highest closed-loop bandwidth: qdd" in text
    assert lines[-1].startswith("(ref) marks quoted reference values")
    # missing cells render as a dash
    row_sea = next(line for line in lines if line.startswith("sea"))
    assert " -" in row_sea


def test_write_creates_both_files(tmp_path):
    rep = _sample_report()
    out = tmp_path / "out"
    paths = rep.write(out)
    assert [os.path.basename(p) for p in paths] == ["report.json", "report.txt"]
    with open(paths[0]) as fh:
        assert fh.read() == rep.to_json_text()
    with open(paths[1]) as fh:
        assert fh.read() == rep.to_text()
