"""Stepped-sine frequency-response measurement and -3 dB detection."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError, InvalidArgumentError
from .integrate import integrate
from .trace import CSV_FLOAT_FORMAT


@dataclass
class FrequencyResponse:
    """Measured magnitude/phase samples on an ascending frequency grid."""

    freqs_hz: np.ndarray
    magnitude: np.ndarray
    phase_deg: np.ndarray

    def to_csv(self, path) -> None:
        data = np.column_stack([self.freqs_hz, self.magnitude, self.phase_deg])
        np.savetxt(path, data, fmt=CSV_FLOAT_FORMAT, delimiter=",",
                   header="freq_hz,magnitude,phase_deg", comments="")

    @classmethod
    def from_csv(cls, path) -> "FrequencyResponse":
        data = np.genfromtxt(path, delimiter=",", names=True)
        return cls(
            freqs_hz=np.asarray(data["freq_hz"], dtype=float),
            magnitude=np.asarray(data["magnitude"], dtype=float),
            phase_deg=np.asarray(data["phase_deg"], dtype=float),
        )


def fundamental_phasor(y: np.ndarray, t: np.ndarray, f_hz: float) -> complex:
    """Fundamental of y at f_hz relative to a sin(2 pi f t) drive.

    Valid when t spans an integer number of periods on a uniform grid; the
    discrete correlation is then exact for every component except the
    harmonics that alias onto the fundamental.
    Returns C + jS where y ~ C sin(wt) + S cos(wt).
    """
    w = 2.0 * np.pi * f_hz
    c = 2.0 * np.mean(y * np.sin(w * t))
    s = 2.0 * np.mean(y * np.cos(w * t))
    return complex(c, s)


def sine_runner(system, dt: float = 1e-4, samples_per_cycle_min: int = 64):
    """Stepped-sine runner backed by the reference RK4 integrator.

    Returns run(f_hz, amplitude, settle_cycles, measure_cycles) -> complex
    output-fundamental phasor.  The step is shrunk per frequency so each
    period holds an integer number of samples (leakage-free correlation).
    """

    def run(f_hz, amplitude, settle_cycles, measure_cycles):
        period = 1.0 / f_hz
        m = max(samples_per_cycle_min, math.ceil(period / dt))
        dt_f = period / m
        w = 2.0 * np.pi * f_hz
        duration = (settle_cycles + measure_cycles) * period
        trace = integrate(system, inputs=lambda t: amplitude * np.sin(w * t),
                          dt=dt_f, duration=duration)
        y = trace["y"][settle_cycles * m:]
        t = trace.time[settle_cycles * m:]
        return fundamental_phasor(y, t, f_hz)

    return run


def measure_frf(run_sine, freqs_hz, amplitude: float, settle_cycles: int = 3,
                measure_cycles: int = 5, settle_time: float = 0.0) -> FrequencyResponse:
    """Measure a frequency response with the stepped-sine protocol.

    run_sine       -- run_sine(f_hz, amplitude, settle_cycles, measure_cycles)
                      returning the measured output-fundamental phasor
    freqs_hz       -- strictly ascending probe frequencies [Hz]
    amplitude      -- drive amplitude (nonzero)
    settle_cycles  -- whole drive cycles discarded before measuring
    measure_cycles -- whole drive cycles correlated against sin/cos
    settle_time    -- optional floor on the settling span [s]; raised to
                      whole cycles, for plants whose slowest pole outlives
                      settle_cycles at high probe frequencies

    Magnitude is |output fundamental| / amplitude; phase is the output's
    cross-correlation angle against the drive, in degrees.
    """
    freqs = np.asarray(freqs_hz, dtype=float)
    if freqs.size == 0:
        raise InvalidArgumentError("empty frequency grid")
    if np.any(freqs <= 0.0) or np.any(np.diff(freqs) <= 0.0):
        raise InvalidArgumentError("frequencies must be positive and strictly ascending")
    if amplitude == 0.0:
        raise InvalidArgumentError("drive amplitude must be nonzero")

    mags = np.empty(freqs.size)
    phases = np.empty(freqs.size)
    for i, f in enumerate(freqs):
        n_settle = max(settle_cycles, math.ceil(settle_time * f))
        try:
            phasor = run_sine(f, amplitude, n_settle, measure_cycles)
        except DivergenceError as err:
            raise DivergenceError(
                f"stepped sine diverged at {f:g} Hz: {err}", where=f
            ) from err
        mags[i] = abs(phasor) / abs(amplitude)
        phases[i] = math.degrees(math.atan2(phasor.imag, phasor.real))
    return FrequencyResponse(freqs_hz=freqs, magnitude=mags, phase_deg=phases)


def bandwidth_3db(frf: FrequencyResponse, dc_gain: float):
    """First downward crossing of dc_gain/sqrt(2), linearly interpolated.

    Returns the crossing frequency in Hz, or None when the magnitude never
    drops below the threshold inside the probed range.  A response already
    below the threshold at the first sample reports that first frequency.
    """
    if dc_gain <= 0.0:
        raise InvalidArgumentError("dc_gain must be positive")
    thr = dc_gain / math.sqrt(2.0)
    mags = frf.magnitude
    freqs = frf.freqs_hz
    if mags[0] < thr:
        return float(freqs[0])
    below = np.flatnonzero(mags < thr)
    if below.size == 0:
        return None
    i = int(below[0])
    f0, f1 = freqs[i - 1], freqs[i]
    m0, m1 = mags[i - 1], mags[i]
    return float(f0 + (thr - m0) * (f1 - f0) / (m1 - m0))
