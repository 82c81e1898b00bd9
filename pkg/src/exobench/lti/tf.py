"""Rational transfer functions in the Laplace variable s.

Coefficients are stored in descending powers of s (numpy polyval
convention) with the denominator normalised to be monic.  Construction via
make_tf() enforces properness; a handful of model quantities are improper
by nature (differentiating paths) and are built with allow_improper=True.
Those can be evaluated on the imaginary axis but never realised as a
state-space system.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ImproperSystemError,
    InvalidSystemError,
    NumericFailureError,
    SingularEvaluationError,
)

# residual tolerance for companion-matrix roots, relative to max |coeff|
_ROOT_RESIDUAL_RTOL = 1e-8


def _strip_leading_zeros(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float)).ravel()
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1)
    return c[nz[0]:]


@dataclass(frozen=True)
class TransferFunction:
    """num(s)/den(s) with monic denominator.

    Degree bookkeeping uses the stripped coefficient arrays, so trailing
    structural zeros supplied by a caller never inflate the degree.
    """

    num: np.ndarray
    den: np.ndarray
    allow_improper: bool = field(default=False, compare=False)

    def __post_init__(self):
        num = _strip_leading_zeros(self.num)
        den = _strip_leading_zeros(self.den)
        if not np.all(np.isfinite(num)) or not np.all(np.isfinite(den)):
            raise InvalidSystemError("non-finite coefficient in transfer function")
        if den.size == 1 and den[0] == 0.0:
            raise InvalidSystemError("denominator is identically zero")
        lead = den[0]
        num = num / lead
        den = den / lead
        if num.size > den.size and not self.allow_improper:
            raise ImproperSystemError(
                f"numerator degree {num.size - 1} exceeds denominator degree {den.size - 1}"
            )
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def order(self) -> int:
        return self.den.size - 1

    @property
    def is_proper(self) -> bool:
        return self.num.size <= self.den.size

    def __call__(self, s):
        return np.polyval(self.num, s) / np.polyval(self.den, s)


def make_tf(num, den) -> TransferFunction:
    """Build a proper transfer function from coefficient sequences.

    Leading zero coefficients are stripped and the denominator is scaled
    to monic form.  Raises InvalidSystemError for an all-zero denominator
    and ImproperSystemError when deg(num) > deg(den).
    """
    return TransferFunction(np.asarray(num, dtype=float), np.asarray(den, dtype=float))


def freq_response_at(tf: TransferFunction, omega: float) -> complex:
    """Evaluate num(j*omega)/den(j*omega) at a single frequency in rad/s."""
    s = 1j * float(omega)
    den_val = np.polyval(tf.den, s)
    # den is monic, so |den(jw)| is at least O(max(1, w)^n) away from zero
    # unless jw sits on (or numerically at) a pole.
    scale = max(1.0, abs(omega)) ** (tf.den.size - 1)
    if abs(den_val) <= 1e-12 * scale:
        raise SingularEvaluationError(
            f"pole on the imaginary axis at omega = {omega:g} rad/s"
        )
    return complex(np.polyval(tf.num, s) / den_val)


def poles(tf: TransferFunction) -> np.ndarray:
    """Denominator roots via the companion-matrix eigenvalues.

    Each returned root r is checked by back-substitution:
    |den(r)| <= 1e-8 * max|den coefficient|, otherwise the whole call is
    rejected with the residuals attached.
    """
    den = tf.den
    if den.size == 1:
        return np.zeros(0, dtype=complex)
    roots = np.roots(den)
    residuals = np.abs(np.polyval(den, roots))
    tol = _ROOT_RESIDUAL_RTOL * np.max(np.abs(den))
    # evaluation of a degree-n polynomial at |r| >> 1 carries rounding noise
    # of order eps * |r|^n; allow for it so legitimately stiff systems pass
    floor = np.finfo(float).eps * np.array(
        [np.polyval(np.abs(den), abs(r)) for r in roots]
    )
    if np.any(residuals > np.maximum(tol, 64.0 * floor)):
        raise NumericFailureError(
            "companion-matrix roots failed the residual check", residuals=residuals
        )
    return roots


def dc_gain(tf: TransferFunction) -> float:
    """Gain at s = 0; raises SingularEvaluationError for a pole at the origin."""
    resp = freq_response_at(tf, 0.0)
    return resp.real
