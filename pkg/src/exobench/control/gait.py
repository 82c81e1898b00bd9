"""Synthetic hip-angle gait data for training the phase regressor.

The stride shape is a fixed two-harmonic Fourier series, affinely rescaled
so every generated stride spans exactly the reference hip excursion of
-22.5 to +32.2 degrees.  Sensor channels mimic a thigh IMU pair: angle,
angular rate and tangential accelerometer reading for the left and right
leg, with the right leg half a stride out of phase.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from ..errors import InvalidArgumentError

HIP_MIN_DEG = -22.5
HIP_MAX_DEG = 32.2
SAMPLE_RATE_HZ = 200.0
WINDOW_SAMPLES = 80          # 0.4 s of history at 200 Hz
WINDOW_HOP = 5
N_CHANNELS = 6
IMU_RADIUS_M = 0.15          # accelerometer lever arm along the thigh
GRAVITY = 9.81

# Fixed stride shape: amplitudes of the first two stride harmonics.  The
# affine rescale below pins the excursion, so only the waveform matters.
_A1, _B1 = 1.0, 0.35
_A2, _B2 = 0.18, -0.12


def _raw_shape(phase):
    """Unscaled two-harmonic stride waveform; phase in [0, 1)."""
    w = 2.0 * math.pi
    return (_A1 * np.cos(w * phase) + _B1 * np.sin(w * phase)
            + _A2 * np.cos(2 * w * phase) + _B2 * np.sin(2 * w * phase))


def _raw_shape_d1(phase):
    w = 2.0 * math.pi
    return (-_A1 * w * np.sin(w * phase) + _B1 * w * np.cos(w * phase)
            - _A2 * 2 * w * np.sin(2 * w * phase) + _B2 * 2 * w * np.cos(2 * w * phase))


def _raw_shape_d2(phase):
    w = 2.0 * math.pi
    return (-_A1 * w * w * np.cos(w * phase) - _B1 * w * w * np.sin(w * phase)
            - _A2 * 4 * w * w * np.cos(2 * w * phase) - _B2 * 4 * w * w * np.sin(2 * w * phase))


def _shape_scale() -> Tuple[float, float]:
    """Affine map (offset, gain) pinning the stride to the reference excursion."""
    grid = np.linspace(0.0, 1.0, 20001)
    raw = _raw_shape(grid)
    lo, hi = float(np.min(raw)), float(np.max(raw))
    gain = math.radians(HIP_MAX_DEG - HIP_MIN_DEG) / (hi - lo)
    offset = math.radians(HIP_MIN_DEG) - gain * lo
    return offset, gain


_OFFSET, _GAIN = _shape_scale()


def hip_angle(phase):
    """Hip flexion angle [rad] at stride phase(s) in [0, 1)."""
    return _OFFSET + _GAIN * _raw_shape(np.mod(phase, 1.0))


def hip_angle_d1(phase):
    """d(angle)/d(phase) [rad per stride]."""
    return _GAIN * _raw_shape_d1(np.mod(phase, 1.0))


def hip_angle_d2(phase):
    """d2(angle)/d(phase)2 [rad per stride squared]."""
    return _GAIN * _raw_shape_d2(np.mod(phase, 1.0))


@dataclass(frozen=True)
class GaitRecord:
    """One continuous walk at a fixed stride period."""

    period_s: float
    dt: float
    phase: np.ndarray              # stride phase in [0, 1) per sample
    channels: np.ndarray           # (n_samples, 6)

    @property
    def n_samples(self) -> int:
        return self.phase.size


def synthesize_gait(period_s: float, duration_s: float,
                    noise_std: float = 0.01, seed: int = 0,
                    fs_hz: float = SAMPLE_RATE_HZ) -> GaitRecord:
    """Simulate an IMU channel set for one walk at a fixed cadence.

    Channels, in order: left angle [rad], left rate [rad/s], left
    tangential acceleration [m/s^2], then the same three for the right
    leg shifted half a stride.  Gaussian sensor noise is scaled per
    channel by ``noise_std`` times the channel's clean RMS.
    """
    if period_s <= 0.0 or duration_s <= 0.0:
        raise InvalidArgumentError("period and duration must be positive")
    dt = 1.0 / fs_hz
    n = int(round(duration_s * fs_hz))
    t = np.arange(n) * dt
    phase = np.mod(t / period_s, 1.0)

    cols = []
    for leg_offset in (0.0, 0.5):
        p = np.mod(phase + leg_offset, 1.0)
        theta = hip_angle(p)
        rate = hip_angle_d1(p) / period_s
        accel_ang = hip_angle_d2(p) / period_s ** 2
        accel = IMU_RADIUS_M * accel_ang + GRAVITY * np.sin(theta)
        cols.extend([theta, rate, accel])
    clean = np.column_stack(cols)

    rng = np.random.default_rng(seed)
    rms = np.sqrt(np.mean(clean ** 2, axis=0))
    noisy = clean + rng.standard_normal(clean.shape) * (noise_std * rms)
    return GaitRecord(period_s=period_s, dt=dt, phase=phase, channels=noisy)


def windows_from_record(record: GaitRecord,
                        window: int = WINDOW_SAMPLES,
                        hop: int = WINDOW_HOP) -> Tuple[np.ndarray, np.ndarray]:
    """Sliding sensor windows and their end-of-window phase targets.

    Returns (X, phase) where X is (n_windows, window * 6) with channels
    interleaved sample-major, and phase holds the stride phase at the last
    sample of each window.
    """
    n = record.n_samples
    if n < window:
        raise InvalidArgumentError(
            f"record too short: {n} samples for a {window}-sample window")
    starts = np.arange(0, n - window + 1, hop)
    X = np.empty((starts.size, window * record.channels.shape[1]))
    for i, s in enumerate(starts):
        X[i] = record.channels[s:s + window].reshape(-1)
    phase = record.phase[starts + window - 1]
    return X, phase


@dataclass
class GaitDataset:
    """Multi-cadence training corpus with one held-out cadence."""

    train_periods_s: Sequence[float]
    holdout_period_s: float
    duration_s: float = 60.0
    noise_std: float = 0.01
    seed: int = 0
    records: Dict[float, GaitRecord] = field(default_factory=dict, init=False)

    def __post_init__(self):
        if len(self.train_periods_s) < 2:
            raise InvalidArgumentError(
                "need at least two training cadences to interpolate between")
        if self.holdout_period_s in self.train_periods_s:
            raise InvalidArgumentError("holdout cadence must not be trained on")
        for k, period in enumerate(tuple(self.train_periods_s) + (self.holdout_period_s,)):
            self.records[period] = synthesize_gait(
                period, self.duration_s, noise_std=self.noise_std,
                seed=self.seed + k)

    def _stack(self, periods) -> Tuple[np.ndarray, np.ndarray]:
        xs, ps = [], []
        for period in periods:
            X, phase = windows_from_record(self.records[period])
            xs.append(X)
            ps.append(phase)
        return np.vstack(xs), np.concatenate(ps)

    def train_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(X, phase) over all training cadences."""
        return self._stack(self.train_periods_s)

    def holdout_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(X, phase) for the held-out cadence."""
        return self._stack([self.holdout_period_s])


def phase_targets(phase: np.ndarray) -> np.ndarray:
    """Map stride phase [0, 1) to the (sin, cos) regression target pair."""
    ang = 2.0 * np.pi * np.asarray(phase, dtype=float)
    return np.column_stack([np.sin(ang), np.cos(ang)])


def circular_r2(phase_true: np.ndarray, pred_sincos: np.ndarray) -> float:
    """Coefficient of determination on the joint (sin, cos) components."""
    target = phase_targets(phase_true)
    pred = np.asarray(pred_sincos, dtype=float)
    ss_res = float(np.sum((pred - target) ** 2))
    mean = target.mean(axis=0)
    ss_tot = float(np.sum((target - mean) ** 2))
    return 1.0 - ss_res / ss_tot


def phase_error_pct(phase_true: np.ndarray, phase_pred_pct: np.ndarray) -> np.ndarray:
    """Signed wrap-aware phase error in percent of stride."""
    diff = np.mod(np.asarray(phase_pred_pct) - 100.0 * np.asarray(phase_true) + 50.0,
                  100.0) - 50.0
    return diff
