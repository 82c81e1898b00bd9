"""The benchmark experiments behind the CLI subcommands.

Each command takes a validated Scenario and produces a Report plus
plot-ready CSV artifacts in the output directory.  Reference numbers from
hardware measurements appear only as tagged reference cells so they can
never be mistaken for outputs of this model.
"""

import math
import os
import warnings
from typing import Dict, Optional

import numpy as np

from ..actuator.analysis import derived_params, g1_tf, g2_tf, output_impedance
from ..actuator.params import ActuatorSpec, HumanParams
from ..actuator.plant import backdrive_peak, build_plant
from ..control.gait import (
    GaitDataset,
    circular_r2,
    hip_angle,
    hip_angle_d1,
    synthesize_gait,
    windows_from_record,
    SAMPLE_RATE_HZ,
    WINDOW_SAMPLES,
)
from ..control.mlp import PhaseEstimator
from ..control.profile import load_profile
from ..control.torque_loop import PiGains, closed_loop_tf, gains_from_spec
from ..errors import ConfigurationError, DivergenceError, InstabilityError
from ..lti.frf import FrequencyResponse, bandwidth_3db, measure_frf
from ..lti.signals import ChirpSpec
from ..lti.tf import dc_gain, freq_response_at, poles
from ..lti.trace import CSV_FLOAT_FORMAT
from .report import Report, computed, config_hash_of, reference
from .scenario import Scenario

# hardware reference values quoted in reports (never computed here)
REF_BANDWIDTH_HZ = {"conventional": 5.1, "sea": 4.2, "qdd": 73.3}
REF_BACKDRIVE_NM = {"conventional": 2.88, "sea": 6.10, "qdd": 0.97}
REF_HW_BANDWIDTH_HZ = {10.0: 57.8, 15.0: 59.3, 20.0: 62.4}  # keyed by chirp Nm
REF_TRACKING = (
    ("walking 0.8 m/s", 1.15, 5.75),
    ("walking 1.1 m/s", 1.23, 6.15),
    ("walking 1.4 m/s", 1.27, 6.35),
    ("squatting 2 s cadence", 0.73, 3.65),
)
_REF_NOTE = "hardware measurement quoted for comparison"

MAX_CSV_ROWS = 4001


def _effective_seed(scenario: Scenario, seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    if scenario.seed is not None:
        return scenario.seed
    return 0


def _hash(scenario: Scenario, seed: int) -> str:
    return config_hash_of({"scenario": scenario.raw, "seed": seed})


def _gains_for(spec: ActuatorSpec, scenario: Scenario) -> PiGains:
    if scenario.gains_override is not None:
        return scenario.gains_override
    return gains_from_spec(spec)


def _write_csv(path: str, header: str, columns) -> None:
    data = np.column_stack(columns)
    if data.shape[0] > MAX_CSV_ROWS:
        stride = int(math.ceil(data.shape[0] / MAX_CSV_ROWS))
        data = data[::stride]
    np.savetxt(path, data, delimiter=",", header=header, comments="",
               fmt=CSV_FLOAT_FORMAT)


def _check_closed_loop_stable(spec: ActuatorSpec, gains: PiGains) -> None:
    tf = closed_loop_tf(spec, gains)
    roots = poles(tf)
    bad = roots[np.real(roots) >= 0.0]
    if bad.size:
        worst = bad[np.argmax(np.real(bad))]
        raise InstabilityError(
            f"closed loop of {spec.label!r} is unstable at the configured "
            f"gains (pole {worst:.6g})",
            frequency_hz=abs(worst.imag) / (2.0 * math.pi))


def _closed_loop_bandwidth_linear(spec: ActuatorSpec, gains: PiGains,
                                  f_lo: float, f_hi: float) -> Optional[float]:
    # analytic curve: free to search well past the simulated grid
    tf = closed_loop_tf(spec, gains)
    freqs = np.logspace(math.log10(f_lo), math.log10(f_hi) + 3.0, 4000)
    mags = np.abs([freq_response_at(tf, 2.0 * math.pi * f) for f in freqs])
    return bandwidth_3db(FrequencyResponse(freqs, mags, np.zeros_like(mags)),
                         dc_gain=1.0)


def _stepped_sine_frf(spec: ActuatorSpec, gains: PiGains, freqs, amplitude,
                      settle_cycles, measure_cycles, settle_time) -> FrequencyResponse:
    plant = build_plant(spec, "locked-output")
    run = plant.closed_loop_sine_runner(gains)
    try:
        return measure_frf(run, freqs, amplitude=amplitude,
                           settle_cycles=settle_cycles,
                           measure_cycles=measure_cycles,
                           settle_time=settle_time)
    except DivergenceError as err:
        f_hz = err.where if err.where is not None else float("nan")
        raise InstabilityError(
            f"closed loop of {spec.label!r} diverged while probing "
            f"{f_hz:g} Hz; the configured gains are unstable under saturation",
            frequency_hz=f_hz) from err


def cmd_bandwidth(scenario: Scenario, out_dir: str,
                  seed: Optional[int] = None) -> Report:
    """Closed-loop torque FRF and -3 dB bandwidth per commanded amplitude."""
    seed = _effective_seed(scenario, seed)
    chash = _hash(scenario, seed)
    p = scenario.params
    freqs = np.logspace(math.log10(p["freq_min"]), math.log10(p["freq_max"]),
                        p["points"])
    report = Report(experiment="bandwidth", config_hash=chash, seed=seed)
    report.metadata["frequency_grid_hz"] = (
        f"{p['freq_min']:g} to {p['freq_max']:g}, {p['points']} log-spaced points")
    os.makedirs(out_dir, exist_ok=True)

    for spec in scenario.specs:
        gains = _gains_for(spec, scenario)
        _check_closed_loop_stable(spec, gains)
        bw_lin = _closed_loop_bandwidth_linear(spec, gains, p["freq_min"],
                                               p["freq_max"])
        for amp in p["amplitudes"]:
            frf = _stepped_sine_frf(spec, gains, freqs, amp,
                                    p["settle_cycles"], p["measure_cycles"],
                                    p["settle_time"])
            csv = os.path.join(out_dir, f"bode_{spec.label}_{amp:g}Nm.csv")
            frf.to_csv(csv)
            bw = bandwidth_3db(frf, dc_gain=1.0)
            cells = {
                "amplitude_nm": computed(amp, "Nm", chash, method="scenario input"),
                "bandwidth_hz": computed(
                    bw, "Hz", chash, method="stepped-sine simulation",
                    note=None if bw is not None else
                    f"no -3 dB crossing below {p['freq_max']:g} Hz"),
                "bandwidth_linear_hz": computed(
                    bw_lin, "Hz", chash, method="linear closed-loop transfer function",
                    note=None if bw_lin is not None else
                    f"no -3 dB crossing below {p['freq_max']:g} Hz"),
            }
            if spec.label == "qdd" and amp in REF_HW_BANDWIDTH_HZ:
                cells["bandwidth_ref_hz"] = reference(
                    REF_HW_BANDWIDTH_HZ[amp], "Hz", note=_REF_NOTE)
            report.add_row(f"{spec.label} @ {amp:g} Nm", **cells)
    report.notes.append(
        "stepped-sine bandwidths include voltage saturation; the linear value "
        "is the small-signal ceiling")
    return report


def cmd_backdrive(scenario: Scenario, out_dir: str,
                  seed: Optional[int] = None) -> Report:
    """Peak coupling torque under the passive hip sweep, per spec."""
    seed = _effective_seed(scenario, seed)
    chash = _hash(scenario, seed)
    p = scenario.params
    drive = ChirpSpec(f0_hz=p["f0"], f1_hz=p["f1"], amplitude=p["amplitude"],
                      duration_s=p["duration"])
    report = Report(experiment="backdrive", config_hash=chash, seed=seed)
    report.metadata["drive"] = (
        f"hip angle chirp {p['f0']:g} to {p['f1']:g} Hz, "
        f"{math.degrees(p['amplitude']):g} deg, {p['duration']:g} s, V = 0")
    os.makedirs(out_dir, exist_ok=True)

    for spec in scenario.specs:
        res = backdrive_peak(spec, drive, dt=p["dt"])
        tr = res.trace
        _write_csv(os.path.join(out_dir, f"backdrive_{spec.label}.csv"),
                   "t,theta_h,theta_h_rate,tau_a",
                   [tr.time, tr["theta_h"], tr["theta_h_rate"], tr["tau_a"]])
        dev = 100.0 * (res.peak_nm / res.predicted_nm - 1.0)
        cells = {
            "peak_nm": computed(res.peak_nm, "Nm", chash,
                                method="time-domain sweep",
                                note=f"{dev:+.2f}% vs frequency-domain value"),
            "predicted_nm": computed(res.predicted_nm, "Nm", chash,
                                     method="|G2| at the terminal frequency"),
            "peak_time_s": computed(res.peak_time_s, "s", chash,
                                    method="time-domain sweep"),
        }
        if spec.label in REF_BACKDRIVE_NM:
            cells["backdrive_ref_nm"] = reference(
                REF_BACKDRIVE_NM[spec.label], "Nm", note=_REF_NOTE)
        report.add_row(spec.label, **cells)
    return report


def cmd_benchmark(scenario: Scenario, out_dir: str,
                  seed: Optional[int] = None) -> Report:
    """Cross-paradigm comparison: resonance, bandwidth, backdrive per spec."""
    seed = _effective_seed(scenario, seed)
    chash = _hash(scenario, seed)
    p = scenario.params
    freqs = np.logspace(math.log10(p["bandwidth_freq_min"]),
                        math.log10(p["bandwidth_freq_max"]),
                        p["bandwidth_points"])
    drive = ChirpSpec(f0_hz=p["backdrive_f0"], f1_hz=p["backdrive_f1"],
                      amplitude=p["backdrive_amplitude"],
                      duration_s=p["backdrive_duration"])
    report = Report(experiment="benchmark", config_hash=chash, seed=seed)
    report.metadata["tuning_policy"] = (
        "one rule for every spec: largest kp with a 45 degree phase margin, "
        "ki = kp*omega_n/10, feedforward = R/(n*k_t)")
    report.metadata["bandwidth_amplitude_nm"] = p["bandwidth_amplitude"]
    os.makedirs(out_dir, exist_ok=True)

    measured: Dict[str, Dict[str, float]] = {}
    for spec in scenario.specs:
        gains = _gains_for(spec, scenario)
        _check_closed_loop_stable(spec, gains)
        d = derived_params(spec)
        frf = _stepped_sine_frf(spec, gains, freqs, p["bandwidth_amplitude"],
                                p["settle_cycles"], p["measure_cycles"],
                                p["settle_time"])
        frf.to_csv(os.path.join(out_dir, f"bode_{spec.label}.csv"))
        bw = bandwidth_3db(frf, dc_gain=1.0)
        bw_lin = _closed_loop_bandwidth_linear(
            spec, gains, p["bandwidth_freq_min"], p["bandwidth_freq_max"])
        res = backdrive_peak(spec, drive)
        g1 = g1_tf(spec)

        cells = {
            "omega_n_hz": computed(d.omega_n_hz, "Hz", chash,
                                   method="analytic resonance"),
            "dc_gain_nm_per_v": computed(dc_gain(g1), "Nm/V", chash,
                                         method="analytic torque path"),
            "bandwidth_hz": computed(bw, "Hz", chash,
                                     method="stepped-sine simulation"),
            "bandwidth_linear_hz": computed(
                bw_lin, "Hz", chash,
                method="linear closed-loop transfer function"),
            "backdrive_nm": computed(res.peak_nm, "Nm", chash,
                                     method="time-domain sweep"),
        }
        if spec.label in REF_BANDWIDTH_HZ:
            ref_bw = REF_BANDWIDTH_HZ[spec.label]
            cells["bandwidth_ref_hz"] = reference(ref_bw, "Hz", note=_REF_NOTE)
            if bw is not None:
                cells["bandwidth_hz"] = computed(
                    bw, "Hz", chash, method="stepped-sine simulation",
                    note=f"{bw / ref_bw:.2f}x the quoted reference")
        if spec.label in REF_BACKDRIVE_NM:
            ref_bd = REF_BACKDRIVE_NM[spec.label]
            cells["backdrive_ref_nm"] = reference(ref_bd, "Nm", note=_REF_NOTE)
            cells["backdrive_nm"] = computed(
                res.peak_nm, "Nm", chash, method="time-domain sweep",
                note=f"{res.peak_nm / ref_bd:.2f}x the quoted reference")
        report.add_row(spec.label, **cells)
        measured[spec.label] = {"bandwidth": bw if bw is not None else float("inf"),
                                "backdrive": res.peak_nm}

    labels = [s.label for s in scenario.specs]
    best_bw = max(labels, key=lambda lb: measured[lb]["bandwidth"])
    best_bd = min(labels, key=lambda lb: measured[lb]["backdrive"])
    report.notes.append(f"highest closed-loop bandwidth: {best_bw}")
    report.notes.append(f"lowest peak backdrive torque: {best_bd}")
    return report


def _train_estimator(params: Dict[str, object], seed: int):
    """Shared by track and train-gait: dataset, fitted estimator, R2 pair."""
    cadences = params.get("train_cadences")
    dataset = GaitDataset(train_periods_s=tuple(cadences),
                          holdout_period_s=params["holdout_cadence"],
                          duration_s=params.get("train_duration",
                                                params.get("duration", 60.0)),
                          noise_std=params["noise_std"], seed=seed)
    X, phase = dataset.train_arrays()
    est = PhaseEstimator(seed=seed)
    history = est.fit(X, phase, epochs=params["epochs"],
                      batch_size=params["batch_size"],
                      lr=params["learning_rate"])
    r2_train = circular_r2(phase, est.predict_sincos(X))
    Xh, ph = dataset.holdout_arrays()
    r2_test = circular_r2(ph, est.predict_sincos(Xh))
    return dataset, est, history, r2_train, r2_test


def cmd_track(scenario: Scenario, out_dir: str,
              seed: Optional[int] = None) -> Report:
    """Full assistance pipeline on one spec: sensors to closed-loop torque."""
    seed = _effective_seed(scenario, seed)
    chash = _hash(scenario, seed)
    p = scenario.params
    spec = scenario.specs[0]
    gains = _gains_for(spec, scenario)
    _check_closed_loop_stable(spec, gains)
    profile = load_profile(p["profile"])
    cadence = p["cadence"]
    duration = p["duration"]
    report = Report(experiment="track", config_hash=chash, seed=seed)
    os.makedirs(out_dir, exist_ok=True)

    if p["model"] is not None:
        model_path = p["model"]
        if not os.path.isabs(model_path) and scenario.path is not None:
            model_path = os.path.join(os.path.dirname(scenario.path), model_path)
        if not os.path.exists(model_path):
            raise ConfigurationError(
                f"phase estimator file {model_path} does not exist; train one "
                "with the train-gait experiment first")
        est = PhaseEstimator.load(model_path)
        report.metadata["estimator"] = os.path.basename(model_path)
    else:
        _, est, _, r2_train, r2_test = _train_estimator(p, seed)
        report.metadata["estimator"] = "trained in-run"
        report.add_row("phase estimator",
                       r2_train=computed(r2_train, "", chash,
                                         method="training-set fit"),
                       r2_holdout=computed(r2_test, "", chash,
                                           method="held-out cadence fit"))

    # online walk at the tracking cadence; fresh stream, same generator
    record = synthesize_gait(cadence, duration, noise_std=p["noise_std"],
                             seed=seed + 100)
    Xw, _ = windows_from_record(record, hop=1)
    pred_pct = est.predict_phase_pct(Xw)
    n_ticks = record.n_samples
    tau_tick = np.zeros(n_ticks)
    tau_tick[WINDOW_SAMPLES - 1:] = profile.torque_at(pred_pct)

    human = HumanParams(
        theta_h=lambda t: hip_angle(np.mod(t / cadence, 1.0)),
        theta_h_rate=lambda t: hip_angle_d1(np.mod(t / cadence, 1.0)) / cadence)
    plant = build_plant(spec, "passive-backdrive", human=human)
    tick = 1.0 / SAMPLE_RATE_HZ
    m = int(math.ceil(tick / plant.default_dt()))
    dt = tick / m
    n_steps = int(round(duration / dt))
    ref = np.repeat(tau_tick, m)
    ref = np.concatenate([ref, np.full(max(0, n_steps + 1 - ref.size), ref[-1])])
    ref = ref[:n_steps + 1]
    trace = plant.run_closed_loop(gains, ref, duration, dt=dt)

    t = trace.time
    phase_true = np.mod(t / cadence, 1.0)
    ideal = profile.torque_at(100.0 * phase_true)
    warmup = max(cadence, WINDOW_SAMPLES / SAMPLE_RATE_HZ)
    mask = t >= warmup
    err = trace["tau_a"][mask] - ideal[mask]
    rms = float(np.sqrt(np.mean(err ** 2)))
    peak = float(np.max(np.abs(ideal[mask])))
    rms_pct = 100.0 * rms / peak if peak > 0.0 else 0.0

    # per-tick CSV: the controller-rate view of the whole pipeline
    ticks = np.arange(n_ticks) * m
    ticks = ticks[ticks <= n_steps]
    _write_csv(os.path.join(out_dir, f"track_{spec.label}.csv"),
               "t,phase_true_pct,phase_est_pct,tau_desired,tau_ref,tau_a,v_cmd",
               [t[ticks], 100.0 * phase_true[ticks],
                np.concatenate([np.full(WINDOW_SAMPLES - 1, np.nan),
                                pred_pct])[:ticks.size],
                ideal[ticks], trace["tau_ref"][ticks], trace["tau_a"][ticks],
                trace["v_applied"][ticks]])

    report.metadata["profile"] = p["profile"]
    report.metadata["cadence_s"] = cadence
    report.add_row(
        f"{spec.label} {p['profile']} @ {cadence:g} s stride",
        rms_nm=computed(rms, "Nm", chash, method="closed-loop simulation",
                        note="error against the profile at true phase"),
        rms_pct_of_peak=computed(rms_pct, "%", chash,
                                 method="closed-loop simulation"),
    )
    for name, ref_nm, ref_pct in REF_TRACKING:
        report.add_row(f"reference: {name}",
                       rms_nm=reference(ref_nm, "Nm", note=_REF_NOTE),
                       rms_pct_of_peak=reference(ref_pct, "%", note=_REF_NOTE))
    return report


def cmd_train_gait(scenario: Scenario, out_dir: str,
                   seed: Optional[int] = None) -> Report:
    """Synthesize gait data, train the phase estimator, write the model file."""
    seed = _effective_seed(scenario, seed)
    chash = _hash(scenario, seed)
    p = scenario.params
    report = Report(experiment="train-gait", config_hash=chash, seed=seed)
    os.makedirs(out_dir, exist_ok=True)

    if p["learning_rate"] == 0.0:
        warnings.warn("learning rate is 0; the model will equal its initialisation")
        report.notes.append("learning rate 0: the model equals its initialisation")

    _, est, history, r2_train, r2_test = _train_estimator(p, seed)
    model_path = os.path.join(out_dir, p["model_name"])
    est.save(model_path)
    _write_csv(os.path.join(out_dir, "loss_curve.csv"), "epoch,loss",
               [np.arange(1, len(history) + 1, dtype=float), np.array(history)])

    report.metadata["model_file"] = p["model_name"]
    report.metadata["train_cadences_s"] = ", ".join(
        f"{c:g}" for c in p["train_cadences"])
    report.metadata["holdout_cadence_s"] = p["holdout_cadence"]
    report.add_row(
        "phase estimator",
        r2_train=computed(r2_train, "", chash, method="training-set fit"),
        r2_holdout=computed(r2_test, "", chash, method="held-out cadence fit"),
        final_loss=computed(history[-1], "", chash, method="training loss"),
    )
    report.notes.append("reference: holdout R2 of 0.997 reported for the "
                        "hardware gait dataset")
    return report


def cmd_tf(scenario: Scenario, out_dir: str,
           seed: Optional[int] = None) -> Report:
    """Analytic summary per spec: transfer functions, poles, resonance."""
    seed = _effective_seed(scenario, seed)
    chash = _hash(scenario, seed)
    report = Report(experiment="tf", config_hash=chash, seed=seed)
    os.makedirs(out_dir, exist_ok=True)

    def poly_text(coeffs):
        order = len(coeffs) - 1
        terms = []
        for i, c in enumerate(coeffs):
            power = order - i
            if power == 0:
                terms.append(f"{c:.6g}")
            elif power == 1:
                terms.append(f"{c:.6g} s")
            else:
                terms.append(f"{c:.6g} s^{power}")
        return " + ".join(terms)

    for spec in scenario.specs:
        d = derived_params(spec)
        g1 = g1_tf(spec)
        g2 = g2_tf(spec)
        char_roots = poles(g1)
        z0 = output_impedance(spec, 0.0)
        report.add_row(
            spec.label,
            omega_n_rad_s=computed(d.omega_n, "rad/s", chash, method="analytic"),
            omega_n_hz=computed(d.omega_n_hz, "Hz", chash, method="analytic"),
            dc_gain_nm_per_v=computed(dc_gain(g1), "Nm/V", chash, method="analytic"),
            impedance_dc_nms_per_rad=computed(
                z0.real, "Nm*s/rad", chash, method="analytic limit"),
            torque_tf=f"({poly_text(g1.num)}) / ({poly_text(g1.den)})",
            motion_tf=f"({poly_text(g2.num)}) / ({poly_text(g2.den)})",
            poles=", ".join(f"{r.real:.6g}" if abs(r.imag) < 1e-9 else f"{r:.6g}"
                            for r in char_roots),
        )
    return report


_COMMANDS = {
    "bandwidth": cmd_bandwidth,
    "backdrive": cmd_backdrive,
    "benchmark": cmd_benchmark,
    "track": cmd_track,
    "train-gait": cmd_train_gait,
    "tf": cmd_tf,
}


def run_experiment(scenario: Scenario, out_dir: str,
                   seed: Optional[int] = None) -> Report:
    """Dispatch a scenario to its experiment implementation."""
    return _COMMANDS[scenario.experiment](scenario, out_dir, seed=seed)
