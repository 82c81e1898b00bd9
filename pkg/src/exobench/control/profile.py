"""Phase-indexed assistance torque profiles.

A profile maps gait phase [0, 100) percent to a desired coupling torque.
Lookup wraps around the stride boundary: the segment between the last
tabulated point and phase 100 interpolates toward the value at phase 0.
"""

import io
from dataclasses import dataclass

import numpy as np

from .._data import data_path
from ..errors import InvalidArgumentError, SchemaError
from ..lti.trace import CSV_FLOAT_FORMAT

PROFILE_NAMES = ("walking", "squatting")
MIN_PROFILE_POINTS = 8


@dataclass(frozen=True)
class TorqueProfile:
    """Tabulated torque vs gait phase with wrap-around interpolation."""

    phase_pct: np.ndarray   # strictly increasing, within [0, 100)
    torque_nm: np.ndarray

    def __post_init__(self):
        phase = np.asarray(self.phase_pct, dtype=float)
        torque = np.asarray(self.torque_nm, dtype=float)
        object.__setattr__(self, "phase_pct", phase)
        object.__setattr__(self, "torque_nm", torque)
        if phase.ndim != 1 or torque.shape != phase.shape:
            raise InvalidArgumentError("phase and torque must be 1-D and equal length")
        if phase.size < MIN_PROFILE_POINTS:
            raise InvalidArgumentError(
                f"a profile needs at least {MIN_PROFILE_POINTS} points, got {phase.size}")
        if np.any(~np.isfinite(phase)) or np.any(~np.isfinite(torque)):
            raise InvalidArgumentError("profile values must be finite")
        if phase[0] < 0.0 or phase[-1] >= 100.0:
            raise InvalidArgumentError("phases must lie in [0, 100)")
        if np.any(np.diff(phase) <= 0.0):
            raise InvalidArgumentError("phases must be strictly increasing")

    @property
    def peak_nm(self) -> float:
        return float(np.max(np.abs(self.torque_nm)))

    def torque_at(self, phase_pct):
        """Torque at the given phase(s) [percent]; wraps modulo 100."""
        p = np.mod(np.asarray(phase_pct, dtype=float), 100.0)
        # close the cycle: append the phase-0 value at phase 100
        xp = np.concatenate([self.phase_pct, [self.phase_pct[0] + 100.0]])
        fp = np.concatenate([self.torque_nm, [self.torque_nm[0]]])
        # shift so the table starts at its own first phase
        q = np.mod(p - self.phase_pct[0], 100.0) + self.phase_pct[0]
        out = np.interp(q, xp, fp)
        return out if out.ndim else float(out)

    def scaled(self, factor: float) -> "TorqueProfile":
        return TorqueProfile(self.phase_pct.copy(), self.torque_nm * factor)

    def to_csv(self, path) -> None:
        header = "phase_pct,torque_nm"
        data = np.column_stack([self.phase_pct, self.torque_nm])
        np.savetxt(path, data, delimiter=",", header=header, comments="",
                   fmt=CSV_FLOAT_FORMAT)

    @classmethod
    def from_csv(cls, path) -> "TorqueProfile":
        with open(path, "r") as fh:
            header = fh.readline().strip()
            if header != "phase_pct,torque_nm":
                raise SchemaError(
                    f"unexpected profile header {header!r} in {path}")
            body = fh.read()
        data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        return cls(data[:, 0], data[:, 1])


def _raised_cosine_lobe(phase, center, width, peak):
    x = np.mod(phase - center + 50.0, 100.0) - 50.0
    lobe = np.where(np.abs(x) <= width / 2.0,
                    0.5 * peak * (1.0 + np.cos(2.0 * np.pi * x / width)),
                    0.0)
    return lobe


def walking_profile(peak_nm: float = 20.0, n_points: int = 200) -> TorqueProfile:
    """Two-lobe stride assistance: extension dip then flexion push.

    An extension lobe of -peak centred at 12.5 percent and a flexion lobe
    of +peak centred at 62.5 percent, each a raised cosine 25 percent wide.
    """
    phase = np.arange(n_points) * (100.0 / n_points)
    torque = (_raised_cosine_lobe(phase, 12.5, 25.0, -peak_nm)
              + _raised_cosine_lobe(phase, 62.5, 25.0, peak_nm))
    return TorqueProfile(phase, torque)


def squatting_profile(peak_nm: float = 20.0, n_points: int = 200) -> TorqueProfile:
    """Single-cycle sinusoidal assistance over the squat cycle."""
    phase = np.arange(n_points) * (100.0 / n_points)
    torque = peak_nm * np.sin(2.0 * np.pi * phase / 100.0)
    return TorqueProfile(phase, torque)


def load_profile(name_or_path: str) -> TorqueProfile:
    """Load a torque profile from a bundled name or a CSV path."""
    if name_or_path in PROFILE_NAMES:
        return TorqueProfile.from_csv(data_path("profiles", f"{name_or_path}.csv"))
    return TorqueProfile.from_csv(name_or_path)
