"""Uniformly sampled multi-channel time series."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, InvalidArgumentError

# CSV floats carry 12 significant digits: enough to round-trip plots and
# cross-checks without locking files to the last bit of the platform libm.
CSV_FLOAT_FORMAT = "%.12g"


@dataclass
class Trace:
    """Fixed-step channel data.

    dt        -- sample interval [s]
    channels  -- name -> 1-D array; all arrays share one length
    """

    dt: float
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InvalidArgumentError("trace dt must be positive")
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise DimensionError(f"channel lengths differ: {sorted(lengths)}")

    def __len__(self) -> int:
        for v in self.channels.values():
            return len(v)
        return 0

    @property
    def time(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def to_csv(self, path) -> None:
        names = list(self.channels)
        data = np.column_stack([self.time] + [self.channels[n] for n in names])
        header = ",".join(["t"] + names)
        np.savetxt(path, data, fmt=CSV_FLOAT_FORMAT, delimiter=",",
                   header=header, comments="")

    @classmethod
    def from_csv(cls, path) -> "Trace":
        data = np.genfromtxt(path, delimiter=",", names=True)
        names = list(data.dtype.names)
        t = data[names[0]]
        if len(t) < 2:
            raise DimensionError("trace CSV needs at least two rows")
        dt = float(t[1] - t[0])
        return cls(dt=dt, channels={n: np.asarray(data[n], dtype=float) for n in names[1:]})
