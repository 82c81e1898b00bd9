"""Gait-phase regression with a small fully connected network.

One hidden sigmoid layer maps a standardized 0.4 s sensor window to the
(sin, cos) encoding of stride phase; atan2 of the two outputs recovers a
wrap-free phase estimate.  Training is plain minibatch gradient descent on
the mean squared error, with every piece (initialisation, forward pass,
gradients) exposed as a pure function so the backward pass can be checked
against finite differences.
"""

import math
import warnings
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import (
    DegenerateChannelError,
    DimensionError,
    InvalidArgumentError,
    SchemaError,
    TrainingDivergenceError,
)
from .gait import N_CHANNELS, WINDOW_SAMPLES, phase_targets

HIDDEN_UNITS = 30
N_OUTPUTS = 2
STD_FLOOR = 1e-9

_MAGIC = "phase-mlp-v1"


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def mlp_init(n_in: int, n_hidden: int, n_out: int, seed: int = 0) -> Dict[str, np.ndarray]:
    """Xavier-uniform weights, zero biases."""
    rng = np.random.default_rng(seed)
    lim1 = math.sqrt(6.0 / (n_in + n_hidden))
    lim2 = math.sqrt(6.0 / (n_hidden + n_out))
    return {
        "W1": rng.uniform(-lim1, lim1, size=(n_in, n_hidden)),
        "b1": np.zeros(n_hidden),
        "W2": rng.uniform(-lim2, lim2, size=(n_hidden, n_out)),
        "b2": np.zeros(n_out),
    }


def mlp_forward(params: Dict[str, np.ndarray], X: np.ndarray,
                return_hidden: bool = False):
    """Network output for a batch (n, n_in) of standardized windows."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != params["W1"].shape[0]:
        raise DimensionError(
            f"expected input shape (n, {params['W1'].shape[0]}), got {X.shape}")
    H = _sigmoid(X @ params["W1"] + params["b1"])
    Y = H @ params["W2"] + params["b2"]
    return (Y, H) if return_hidden else Y


def mlp_loss(params: Dict[str, np.ndarray], X: np.ndarray, T: np.ndarray) -> float:
    Y = mlp_forward(params, X)
    return 0.5 * float(np.sum((Y - T) ** 2)) / X.shape[0]


def mlp_gradients(params: Dict[str, np.ndarray], X: np.ndarray,
                  T: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    """Loss and its gradient for a batch; loss is 0.5 mean-sum-square error."""
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    n = X.shape[0]
    Y, H = mlp_forward(params, X, return_hidden=True)
    dY = (Y - T) / n
    loss = 0.5 * float(np.sum((Y - T) ** 2)) / n
    grads = {
        "W2": H.T @ dY,
        "b2": dY.sum(axis=0),
    }
    dH = (dY @ params["W2"].T) * H * (1.0 - H)
    grads["W1"] = X.T @ dH
    grads["b1"] = dH.sum(axis=0)
    return loss, grads


def gradient_check(params: Dict[str, np.ndarray], X: np.ndarray, T: np.ndarray,
                   h: float = 1e-5, n_coords: Optional[int] = None,
                   seed: int = 0) -> float:
    """Largest relative disagreement between analytic and central-difference
    gradients.

    Checks every parameter entry by default; pass n_coords to check that
    many randomly chosen coordinates instead (for full-size networks).
    """
    _, grads = mlp_gradients(params, X, T)
    keys = ("W1", "b1", "W2", "b2")
    sizes = [params[k].size for k in keys]
    total = sum(sizes)
    if n_coords is None or n_coords >= total:
        coords = np.arange(total)
    else:
        coords = np.random.default_rng(seed).choice(total, size=n_coords,
                                                    replace=False)
    bounds = np.cumsum(sizes)
    worst = 0.0
    for flat_idx in coords:
        k = int(np.searchsorted(bounds, flat_idx, side="right"))
        idx = int(flat_idx - (bounds[k - 1] if k else 0))
        flat = params[keys[k]].reshape(-1)
        keep = flat[idx]
        flat[idx] = keep + h
        lp = mlp_loss(params, X, T)
        flat[idx] = keep - h
        lm = mlp_loss(params, X, T)
        flat[idx] = keep
        num = (lp - lm) / (2.0 * h)
        ana = grads[keys[k]].reshape(-1)[idx]
        denom = max(1e-12, abs(num) + abs(ana))
        worst = max(worst, abs(num - ana) / denom)
    return worst


def mlp_train(params: Dict[str, np.ndarray], X: np.ndarray, T: np.ndarray,
              epochs: int, batch_size: int, lr: float,
              seed: int = 0) -> List[float]:
    """Minibatch gradient descent in place; returns the per-epoch loss."""
    if epochs < 1 or batch_size < 1:
        raise InvalidArgumentError("epochs and batch_size must be positive")
    if lr < 0.0:
        raise InvalidArgumentError("learning rate must be non-negative")
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    history: List[float] = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            _, grads = mlp_gradients(params, X[idx], T[idx])
            for key in params:
                params[key] -= lr * grads[key]
        loss = mlp_loss(params, X, T)
        if not math.isfinite(loss):
            raise TrainingDivergenceError(
                f"training loss became non-finite at epoch {epoch}", epoch=epoch)
        history.append(loss)
    return history


class PhaseEstimator:
    """Stride-phase regressor over standardized multi-channel windows."""

    def __init__(self, window: int = WINDOW_SAMPLES, n_channels: int = N_CHANNELS,
                 n_hidden: int = HIDDEN_UNITS, seed: int = 0):
        self.window = window
        self.n_channels = n_channels
        self.n_hidden = n_hidden
        self.seed = seed
        self.params: Optional[Dict[str, np.ndarray]] = None
        self.channel_mean: Optional[np.ndarray] = None
        self.channel_std: Optional[np.ndarray] = None

    @property
    def n_inputs(self) -> int:
        return self.window * self.n_channels

    # -- normalisation -------------------------------------------------------

    def _check_shape(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_inputs:
            raise DimensionError(
                f"expected windows of shape (n, {self.n_inputs}), got {X.shape}")
        return X

    def fit_normalisation(self, X: np.ndarray) -> None:
        X = self._check_shape(X)
        per_channel = X.reshape(X.shape[0], self.window, self.n_channels)
        self.channel_mean = per_channel.mean(axis=(0, 1))
        self.channel_std = per_channel.std(axis=(0, 1))
        dead = np.nonzero(self.channel_std < STD_FLOOR)[0]
        if dead.size:
            raise DegenerateChannelError(
                f"training channel(s) {dead.tolist()} are constant; "
                "standardisation would divide by zero")

    def standardize(self, X: np.ndarray) -> np.ndarray:
        if self.channel_mean is None:
            raise InvalidArgumentError("normalisation statistics not fitted yet")
        X = self._check_shape(X)
        std = self.channel_std.copy()
        low = std < STD_FLOOR
        if np.any(low):
            warnings.warn("channel standard deviation floored during "
                          "standardisation; inputs may be degenerate")
            std[low] = STD_FLOOR
        shaped = X.reshape(X.shape[0], self.window, self.n_channels)
        out = (shaped - self.channel_mean) / std
        return out.reshape(X.shape[0], -1)

    # -- training and inference ----------------------------------------------

    def fit(self, X: np.ndarray, phase: np.ndarray, epochs: int = 200,
            batch_size: int = 64, lr: float = 1e-3,
            seed: Optional[int] = None) -> List[float]:
        """Train on windows X and stride phases in [0, 1); returns loss history."""
        seed = self.seed if seed is None else seed
        self.fit_normalisation(X)
        Xs = self.standardize(X)
        T = phase_targets(phase)
        self.params = mlp_init(self.n_inputs, self.n_hidden, N_OUTPUTS, seed=seed)
        return mlp_train(self.params, Xs, T, epochs=epochs,
                         batch_size=batch_size, lr=lr, seed=seed + 1)

    def predict_sincos(self, X: np.ndarray) -> np.ndarray:
        if self.params is None:
            raise InvalidArgumentError("estimator is untrained")
        return mlp_forward(self.params, self.standardize(X))

    def predict_phase_pct(self, X: np.ndarray) -> np.ndarray:
        """Estimated stride phase in percent [0, 100)."""
        sc = self.predict_sincos(X)
        ang = np.arctan2(sc[:, 0], sc[:, 1])
        return np.mod(ang / (2.0 * np.pi), 1.0) * 100.0

    # -- persistence -----------------------------------------------------------

    def save(self, path) -> None:
        if self.params is None:
            raise InvalidArgumentError("cannot save an untrained estimator")
        with open(path, "w") as fh:
            fh.write(_MAGIC + "\n")
            fh.write(f"{self.window} {self.n_channels} {self.n_hidden} {N_OUTPUTS}\n")
            for name, arr in (("mean", self.channel_mean), ("std", self.channel_std),
                              ("W1", self.params["W1"]), ("b1", self.params["b1"]),
                              ("W2", self.params["W2"]), ("b2", self.params["b2"])):
                arr = np.atleast_2d(arr)
                fh.write(f"{name} {arr.shape[0]} {arr.shape[1]}\n")
                for row in arr:
                    fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def load(cls, path) -> "PhaseEstimator":
        with open(path, "r") as fh:
            magic = fh.readline().strip()
            if magic != _MAGIC:
                raise SchemaError(f"unrecognised estimator file (header {magic!r})")
            window, n_channels, n_hidden, n_out = map(int, fh.readline().split())
            if n_out != N_OUTPUTS:
                raise SchemaError(f"unsupported output count {n_out}")
            est = cls(window=window, n_channels=n_channels, n_hidden=n_hidden)
            blocks = {}
            for _ in range(6):
                header = fh.readline().split()
                if len(header) != 3:
                    raise SchemaError("truncated estimator file")
                name, rows, cols = header[0], int(header[1]), int(header[2])
                data = np.array([[float(v) for v in fh.readline().split()]
                                 for _ in range(rows)])
                if data.shape != (rows, cols):
                    raise SchemaError(f"block {name} has shape {data.shape}, "
                                      f"expected ({rows}, {cols})")
                blocks[name] = data
        est.channel_mean = blocks["mean"].reshape(-1)
        est.channel_std = blocks["std"].reshape(-1)
        est.params = {
            "W1": blocks["W1"],
            "b1": blocks["b1"].reshape(-1),
            "W2": blocks["W2"],
            "b2": blocks["b2"].reshape(-1),
        }
        if est.params["W1"].shape != (est.n_inputs, n_hidden):
            raise SchemaError("weight shapes do not match the declared layout")
        return est
