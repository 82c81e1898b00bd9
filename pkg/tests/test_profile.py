"""Phase-indexed torque profiles."""

import numpy as np
import pytest

from exobench.control.profile import (
    MIN_PROFILE_POINTS,
    PROFILE_NAMES,
    TorqueProfile,
    load_profile,
    squatting_profile,
    walking_profile,
)
from exobench.errors import InvalidArgumentError, SchemaError


def test_squat_profile_shape():
    prof = squatting_profile(peak_nm=20.0)
    assert prof.torque_at(25.0) == pytest.approx(20.0)
    assert prof.torque_at(75.0) == pytest.approx(-20.0)
    assert prof.torque_at(0.0) == pytest.approx(0.0, abs=1e-12)
    assert prof.peak_nm == pytest.approx(20.0)


def test_walking_profile_lobes():
    prof = walking_profile(peak_nm=20.0)
    assert prof.torque_at(12.5) == pytest.approx(-20.0)
    assert prof.torque_at(62.5) == pytest.approx(20.0)
    # quiet zones between the lobes
    assert prof.torque_at(40.0) == 0.0
    assert prof.torque_at(90.0) == 0.0
    assert prof.peak_nm == pytest.approx(20.0)


def test_wrap_around_interpolation():
    phase = np.arange(0.0, 100.0, 10.0)
    torque = np.arange(10.0)
    prof = TorqueProfile(phase, torque)
    # between the last point (90, 9) and the phase-0 value (100, 0)
    assert prof.torque_at(95.0) == pytest.approx(4.5)
    assert prof.torque_at(-5.0) == pytest.approx(4.5)
    assert prof.torque_at(105.0) == pytest.approx(prof.torque_at(5.0))
    out = prof.torque_at(np.array([15.0, 95.0]))
    assert out.shape == (2,)
    assert isinstance(prof.torque_at(15.0), float)


def test_wrap_with_offset_start():
    phase = np.linspace(5.0, 95.0, 10)
    torque = np.sin(phase / 50.0)
    prof = TorqueProfile(phase, torque)
    # below the first tabulated phase the lookup wraps to the tail segment
    expected = np.interp(102.0, [95.0, 105.0], [torque[-1], torque[0]])
    assert prof.torque_at(2.0) == pytest.approx(expected)


def test_scaling():
    prof = walking_profile(peak_nm=20.0).scaled(0.25)
    assert prof.peak_nm == pytest.approx(5.0)


def test_profile_validation():
    good_phase = np.linspace(0.0, 90.0, 10)
    with pytest.raises(InvalidArgumentError, match="at least"):
        TorqueProfile(good_phase[:MIN_PROFILE_POINTS - 1],
                      np.zeros(MIN_PROFILE_POINTS - 1))
    with pytest.raises(InvalidArgumentError, match="increasing"):
        TorqueProfile(good_phase[::-1], np.zeros(10))
    with pytest.raises(InvalidArgumentError, match="0, 100"):
        TorqueProfile(np.linspace(0.0, 100.0, 10), np.zeros(10))
    with pytest.raises(InvalidArgumentError, match="finite"):
        TorqueProfile(good_phase, np.full(10, np.nan))
    with pytest.raises(InvalidArgumentError, match="equal length"):
        TorqueProfile(good_phase, np.zeros(9))


def test_csv_round_trip(tmp_path):
    prof = walking_profile(peak_nm=17.5)
    path = tmp_path / "profile.csv"
    prof.to_csv(path)
    back = TorqueProfile.from_csv(path)
    assert np.allclose(back.phase_pct, prof.phase_pct, rtol=1e-11)
    assert np.allclose(back.torque_nm, prof.torque_nm, rtol=1e-11, atol=1e-14)


def test_csv_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("phase,torque\n0,0\n")
    with pytest.raises(SchemaError, match="header"):
        TorqueProfile.from_csv(path)


def test_bundled_profiles():
    for name in PROFILE_NAMES:
        prof = load_profile(name)
        assert prof.peak_nm == pytest.approx(20.0, rel=1e-9)
    walking = load_profile("walking")
    fresh = walking_profile()
    assert np.allclose(walking.torque_nm, fresh.torque_nm,
                       rtol=1e-11, atol=1e-14)


def test_load_profile_from_path(tmp_path):
    path = tmp_path / "custom.csv"
    squatting_profile(peak_nm=5.0).to_csv(path)
    prof = load_profile(str(path))
    assert prof.peak_nm == pytest.approx(5.0)
