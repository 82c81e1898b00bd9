"""Time-domain plant: modes, linearity, telemetry, and the backdrive path."""

import math

import numpy as np
import pytest

from exobench.actuator.analysis import g1_tf, g2_tf
from exobench.actuator.params import (
    ActuatorSpec,
    HumanParams,
    MotorParams,
    TransmissionParams,
)
from exobench.actuator.plant import (
    MODES,
    backdrive_peak,
    build_plant,
)
from exobench.errors import (
    ConfigurationError,
    DivergenceError,
    InvalidArgumentError,
    StepTooLargeError,
)
from exobench.lti.frf import measure_frf
from exobench.lti.integrate import integrate
from exobench.lti.signals import ChirpSpec
from exobench.lti.tf import freq_response_at

_PRESCRIBED = HumanParams(theta_h=lambda t: 0.1 * np.sin(2.0 * t),
                          theta_h_rate=lambda t: 0.2 * np.cos(2.0 * t))


def test_state_layout_per_mode(qdd):
    plant = build_plant(qdd, "locked-output")
    assert plant.state_names == ("theta_m", "theta_m_rate")
    plant_l = build_plant(qdd, "locked-output", include_L=True)
    assert plant_l.state_names == ("current", "theta_m", "theta_m_rate")
    plant_b = build_plant(qdd, "passive-backdrive", human=_PRESCRIBED)
    assert plant_b.n_states == 2
    plant_c = build_plant(qdd, "coupled-human", human=HumanParams(J_h=0.8))
    assert plant_c.state_names == ("theta_m", "theta_m_rate",
                                   "theta_h", "theta_h_rate")
    assert plant_c.coupled


def test_mode_validation(qdd):
    with pytest.raises(InvalidArgumentError, match="unknown mode"):
        build_plant(qdd, "free-run")
    with pytest.raises(ConfigurationError):
        build_plant(qdd, "passive-backdrive")  # needs a trajectory
    with pytest.raises(ConfigurationError):
        build_plant(qdd, "coupled-human", human=_PRESCRIBED)
    zero_l = ActuatorSpec(
        label="no-inductance",
        motor=MotorParams(R=1.0, L=0.0, k_t=0.1, b_m=0.01, J_m=1e-5,
                          V_max=24.0, i_nominal=1.0),
        transmission=TransmissionParams(n=10.0, k_c=100.0, b_c=0.01))
    with pytest.raises(InvalidArgumentError, match="inductance"):
        build_plant(zero_l, "locked-output", include_L=True)
    assert MODES == ("locked-output", "passive-backdrive", "coupled-human")


def test_default_step_respects_eigenvalues(qdd, presets):
    for spec in presets.values():
        plant = build_plant(spec, "locked-output")
        worst = float(np.max(np.abs(plant.stability_eigenvalues())))
        assert plant.default_dt() * worst == pytest.approx(0.05, rel=1e-9)


def test_dc_torque_gain(presets):
    for spec in presets.values():
        plant = build_plant(spec, "locked-output")
        # settle for many multiples of the slowest pole
        tau_slow = 1.0 / float(np.min(np.abs(plant.stability_eigenvalues())))
        trace = plant.run(voltage=lambda t: 1.0, duration=20.0 * tau_slow)
        m, tr = spec.motor, spec.transmission
        assert trace["tau_a"][-1] == pytest.approx(tr.n * m.k_t / m.R,
                                                   rel=5e-3)


def test_superposition_below_the_clamp(qdd):
    plant = build_plant(qdd, "locked-output")
    v1 = lambda t: 0.3 * np.sin(50.0 * t)
    v2 = lambda t: 0.2 * np.sin(120.0 * t + 1.0)
    both = lambda t: v1(t) + v2(t)
    dt = plant.default_dt()
    y1 = plant.run(voltage=v1, duration=0.4, dt=dt)["tau_a"]
    y2 = plant.run(voltage=v2, duration=0.4, dt=dt)["tau_a"]
    y12 = plant.run(voltage=both, duration=0.4, dt=dt)["tau_a"]
    scale = np.max(np.abs(y12))
    assert np.max(np.abs(y12 - (y1 + y2))) < 1e-9 * scale


def test_gear_telemetry_identities(qdd):
    plant = build_plant(qdd, "locked-output")
    trace = plant.run(voltage=lambda t: 2.0 * np.sin(30.0 * t), duration=0.2)
    n = qdd.transmission.n
    assert np.array_equal(trace["theta_2"], trace["theta_m"] / n)
    assert np.array_equal(trace["tau_1"], trace["tau_a"] / n)
    assert np.array_equal(trace["tau_2"], trace["tau_a"])
    assert "current" in trace.channels
    assert "v_applied" in trace.channels


def test_voltage_clamp(qdd):
    plant = build_plant(qdd, "locked-output")
    vmax = qdd.motor.V_max
    over = plant.run(voltage=lambda t: 3.0 * vmax, duration=0.1)
    at_limit = plant.run(voltage=lambda t: vmax, duration=0.1)
    assert np.all(over["v_applied"] == vmax)
    assert np.allclose(over["tau_a"], at_limit["tau_a"], rtol=1e-12, atol=1e-12)


def test_kernel_matches_reference_integrator(qdd):
    voltage = lambda t: np.sin(30.0 * t)
    plant = build_plant(qdd, "locked-output")
    dt = plant.default_dt()
    fast = plant.run(voltage=voltage, duration=0.05, dt=dt)
    slow = integrate(plant.as_ode(voltage), dt=dt, duration=0.05)
    for name in ("theta_m", "theta_m_rate"):
        scale = max(np.max(np.abs(slow[name])), 1e-30)
        assert np.max(np.abs(fast[name] - slow[name])) < 1e-12 * scale
    assert np.max(np.abs(fast["tau_a"] - slow["tau_a"])) < 1e-12 * max(
        np.max(np.abs(slow["tau_a"])), 1e-30)


def test_kernel_matches_reference_integrator_coupled(qdd):
    human = HumanParams(J_h=0.6, tau_l=lambda t: 5.0 * np.sin(3.0 * t))
    plant = build_plant(qdd, "coupled-human", human=human)
    dt = plant.default_dt()
    voltage = lambda t: 0.5 * np.sin(20.0 * t)
    fast = plant.run(voltage=voltage, duration=0.05, dt=dt)
    slow = integrate(plant.as_ode(voltage), dt=dt, duration=0.05)
    for name in plant.state_names:
        scale = max(np.max(np.abs(slow[name])), 1e-30)
        assert np.max(np.abs(fast[name] - slow[name])) < 1e-10 * scale


def test_reference_integrator_guards_large_steps(qdd):
    plant = build_plant(qdd, "locked-output")
    with pytest.raises(StepTooLargeError):
        integrate(plant.as_ode(lambda t: 1.0), dt=1.0, duration=2.0)


def test_divergence_reported_with_time(qdd):
    plant = build_plant(qdd, "locked-output")
    with pytest.raises(DivergenceError) as err:
        plant.run(voltage=lambda t: 10.0, duration=5.0, dt=0.1)
    assert err.value.where is not None
    assert err.value.where > 0.0


def test_measured_frf_matches_torque_path(qdd):
    plant = build_plant(qdd, "locked-output")
    run = plant.sine_runner(drive="voltage")
    freqs = np.array([2.0, 10.0, 40.0])
    frf = measure_frf(run, freqs, amplitude=0.5, settle_cycles=4,
                      measure_cycles=5)
    for f, mag in zip(frf.freqs_hz, frf.magnitude):
        ref = abs(freq_response_at(g1_tf(qdd), 2.0 * math.pi * f))
        assert mag == pytest.approx(ref, rel=5e-3)


def test_saturated_gain_never_exceeds_linear(qdd):
    plant = build_plant(qdd, "locked-output")
    run = plant.sine_runner(drive="voltage")
    f = 10.0
    amp = 3.0 * qdd.motor.V_max
    phasor = run(f, amp, 4, 5)
    mag = abs(phasor) / amp
    linear = abs(freq_response_at(g1_tf(qdd), 2.0 * math.pi * f))
    assert mag < linear
    # and the clipped output cannot exceed the full-supply fundamental
    assert abs(phasor) < linear * qdd.motor.V_max * 4.0 / math.pi * 1.001


def test_motion_drive_matches_motion_path(qdd):
    human = HumanParams(theta_h=lambda t: 0.0, theta_h_rate=lambda t: 0.0)
    plant = build_plant(qdd, "passive-backdrive", human=human)
    run = plant.sine_runner(drive="motion")
    f = 1.0
    amp = math.radians(5.0)
    phasor = run(f, amp, 4, 5)
    ref = abs(freq_response_at(g2_tf(qdd), 2.0 * math.pi * f))
    assert abs(phasor) / amp == pytest.approx(ref, rel=5e-3)


def test_inductance_is_negligible_at_low_frequency(qdd):
    # below about 0.2 R/L the electrical pole contributes < 2 percent
    f = 5.0
    mags = {}
    for include_l in (False, True):
        plant = build_plant(qdd, "locked-output", include_L=include_l)
        phasor = plant.sine_runner(drive="voltage")(f, 0.5, 4, 5)
        mags[include_l] = abs(phasor)
    assert 2.0 * math.pi * f < 0.2 * qdd.motor.R / qdd.motor.L
    assert mags[True] == pytest.approx(mags[False], rel=0.02)


def test_sine_runner_mode_guards(qdd):
    coupled = build_plant(qdd, "coupled-human")
    with pytest.raises(ConfigurationError):
        coupled.sine_runner()
    locked = build_plant(qdd, "locked-output")
    with pytest.raises(InvalidArgumentError):
        locked.sine_runner(drive="torque")
    backdrive = build_plant(qdd, "passive-backdrive", human=_PRESCRIBED)
    with pytest.raises(ConfigurationError):
        backdrive.closed_loop_sine_runner(None)


def test_backdrive_peak_against_motion_path(qdd):
    drive = ChirpSpec(f0_hz=0.0, f1_hz=1.0, amplitude=math.radians(10.0),
                      duration_s=40.0)
    res = backdrive_peak(qdd, drive)
    expected = abs(freq_response_at(g2_tf(qdd), 2.0 * math.pi)) * drive.amplitude
    assert res.predicted_nm == pytest.approx(expected, rel=1e-12)
    assert res.peak_nm == pytest.approx(res.predicted_nm, rel=0.05)
    assert 0.0 < res.peak_time_s <= drive.duration_s
    for name in ("theta_h", "theta_h_rate", "tau_a", "theta_m", "current"):
        assert name in res.trace.channels


def test_backdrive_is_passive(qdd):
    # with the supply off the drive can only absorb energy from the hip:
    # the net work it does on the human is never positive
    drive = ChirpSpec(f0_hz=0.0, f1_hz=1.0, amplitude=math.radians(10.0),
                      duration_s=20.0)
    res = backdrive_peak(qdd, drive)
    tr = res.trace
    power = tr["tau_a"] * tr["theta_h_rate"]
    work = np.trapezoid(power, dx=tr.dt)
    assert work < 0.0
    assert work < -1.0  # tens of joules are dissipated over this sweep


def test_backdrive_inductance_effect_is_small(qdd):
    drive = ChirpSpec(f0_hz=0.0, f1_hz=1.0, amplitude=math.radians(10.0),
                      duration_s=20.0)
    base = backdrive_peak(qdd, drive).peak_nm
    with_l = backdrive_peak(qdd, drive, include_L=True).peak_nm
    assert with_l == pytest.approx(base, rel=0.01)


def test_backdrive_validation(qdd):
    with pytest.raises(InvalidArgumentError):
        backdrive_peak(qdd, ChirpSpec(f0_hz=0.0, f1_hz=1.0, amplitude=0.0,
                                      duration_s=10.0))


def test_closed_loop_reference_array_length(qdd):
    from exobench.control.torque_loop import gains_from_spec

    plant = build_plant(qdd, "locked-output")
    gains = gains_from_spec(qdd)
    with pytest.raises(InvalidArgumentError, match="samples"):
        plant.run_closed_loop(gains, np.zeros(10), duration=1.0)
