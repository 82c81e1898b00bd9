"""Test-input generators: linear frequency sweeps."""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError, OutOfRangeError


@dataclass(frozen=True)
class ChirpSpec:
    """Linear sweep x(t) = A sin(2 pi (f0 t + (f1 - f0) t^2 / (2 D))).

    f0_hz / f1_hz  -- start and end instantaneous frequency [Hz]
    amplitude      -- peak value, units of the driven quantity
    duration_s     -- sweep length D [s]
    """

    f0_hz: float
    f1_hz: float
    amplitude: float
    duration_s: float

    def __post_init__(self):
        if self.duration_s <= 0.0:
            raise InvalidArgumentError("chirp duration must be positive")
        if self.f0_hz < 0.0 or self.f1_hz < 0.0:
            raise InvalidArgumentError("chirp frequencies must be non-negative")

    def instantaneous_frequency(self, t):
        return self.f0_hz + (self.f1_hz - self.f0_hz) * np.asarray(t) / self.duration_s


def _check_range(spec: ChirpSpec, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > spec.duration_s):
        raise OutOfRangeError(
            f"chirp evaluated outside [0, {spec.duration_s:g}] s"
        )
    return t


def chirp_phase(spec: ChirpSpec, t):
    t = _check_range(spec, t)
    return 2.0 * np.pi * (spec.f0_hz * t + (spec.f1_hz - spec.f0_hz) * t * t / (2.0 * spec.duration_s))


def chirp_value(spec: ChirpSpec, t):
    """Sweep value at time t (scalar or array); t must lie in [0, duration]."""
    out = spec.amplitude * np.sin(chirp_phase(spec, t))
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def chirp_rate(spec: ChirpSpec, t):
    """Analytic d/dt of chirp_value, for prescribing velocity channels."""
    t = _check_range(spec, t)
    omega = 2.0 * np.pi * spec.instantaneous_frequency(t)
    out = spec.amplitude * np.cos(chirp_phase(spec, t)) * omega
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out
