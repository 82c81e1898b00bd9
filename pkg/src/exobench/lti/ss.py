"""Minimal state-space container and transfer-function realisation."""

from dataclasses import dataclass

import numpy as np

from ..errors import ImproperSystemError, InvalidSystemError
from .tf import TransferFunction


@dataclass(frozen=True)
class StateSpace:
    """dx/dt = A x + B u,  y = C x + D u (single input, single output here)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise InvalidSystemError(f"A must be square, got {A.shape}")
        B = np.asarray(self.B, dtype=float).reshape(n, -1)
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        if C.shape[1] != n:
            raise InvalidSystemError("C column count must match state dimension")
        if D.shape != (C.shape[0], B.shape[1]):
            raise InvalidSystemError("D shape must be (outputs, inputs)")
        for name, m in (("A", A), ("B", B), ("C", C), ("D", D)):
            if not np.all(np.isfinite(m)):
                raise InvalidSystemError(f"non-finite entry in {name}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    def stability_eigenvalues(self) -> np.ndarray:
        """Eigenvalues that bound the usable fixed integration step."""
        return np.linalg.eigvals(self.A)

    def deriv(self, x: np.ndarray, u: float) -> np.ndarray:
        return self.A @ x + self.B[:, 0] * u

    def output(self, x: np.ndarray, u: float) -> float:
        return float(self.C[0] @ x + self.D[0, 0] * u)


def tf_to_ss(tf: TransferFunction) -> StateSpace:
    """Controllable canonical realisation of a proper transfer function.

    The state count equals the denominator degree.  An improper transfer
    function has no state-space form and is rejected.
    """
    if not tf.is_proper:
        raise ImproperSystemError(
            "improper transfer function cannot be realised as a state-space system"
        )
    den = tf.den  # monic
    n = den.size - 1
    num = np.concatenate([np.zeros(den.size - tf.num.size), tf.num])
    d = num[0]  # direct feedthrough after long division (den is monic)
    num_sp = num[1:] - d * den[1:]  # strictly proper remainder, descending
    if n == 0:
        raise InvalidSystemError("static gain has no state-space realisation")
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den[:0:-1]  # ascending-order coefficients, negated
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0
    C = num_sp[::-1].reshape(1, n)
    D = np.array([[d]])
    return StateSpace(A, B, C, D)
