"""Transfer-function container, evaluation and root finding."""

import numpy as np
import pytest

from exobench.errors import (
    ImproperSystemError,
    InvalidSystemError,
    SingularEvaluationError,
)
from exobench.lti.tf import (
    TransferFunction,
    dc_gain,
    freq_response_at,
    make_tf,
    poles,
)


def test_denominator_made_monic():
    tf = make_tf([2.0, 4.0], [2.0, 6.0, 8.0])
    assert np.allclose(tf.den, [1.0, 3.0, 4.0])
    assert np.allclose(tf.num, [1.0, 2.0])
    assert tf.order == 2


def test_leading_zeros_stripped():
    tf = make_tf([0.0, 0.0, 3.0], [0.0, 1.0, 2.0])
    assert tf.num.size == 1
    assert tf.den.size == 2
    assert tf.order == 1
    # trailing structural zeros in the input must not inflate the degree
    tf2 = make_tf([0.0, 1.0, 1.0], [1.0, 2.0, 1.0])
    assert tf2.num.size == 2


def test_improper_rejected_by_default():
    with pytest.raises(ImproperSystemError):
        make_tf([1.0, 0.0, 0.0], [1.0, 1.0])


def test_improper_allowed_when_requested():
    tf = TransferFunction(np.array([1.0, 0.0, 0.0]), np.array([1.0, 1.0]),
                          allow_improper=True)
    assert not tf.is_proper
    # s^2 / (s + 1) at s = 2j
    s = 2j
    assert freq_response_at(tf, 2.0) == pytest.approx(s * s / (s + 1.0))


def test_zero_denominator_rejected():
    with pytest.raises(InvalidSystemError):
        make_tf([1.0], [0.0])
    with pytest.raises(InvalidSystemError):
        make_tf([1.0], [0.0, 0.0])


def test_nonfinite_coefficients_rejected():
    with pytest.raises(InvalidSystemError):
        make_tf([np.nan], [1.0, 1.0])
    with pytest.raises(InvalidSystemError):
        make_tf([1.0], [1.0, np.inf])


def test_freq_response_matches_direct_arithmetic():
    tf = make_tf([3.0, 6.0], [1.0, 2.0, 5.0])
    for w in (0.0, 0.3, 1.0, 7.5, 120.0):
        s = 1j * w
        expected = (3.0 * s + 6.0) / (s * s + 2.0 * s + 5.0)
        assert freq_response_at(tf, w) == pytest.approx(expected, rel=1e-12)
        assert tf(s) == pytest.approx(expected, rel=1e-12)


def test_pole_on_imaginary_axis_detected():
    # pure integrator: pole at the origin
    tf = make_tf([1.0], [1.0, 0.0])
    with pytest.raises(SingularEvaluationError):
        freq_response_at(tf, 0.0)
    with pytest.raises(SingularEvaluationError):
        dc_gain(tf)
    # undamped oscillator: poles at +-2j
    tf2 = make_tf([1.0], [1.0, 0.0, 4.0])
    with pytest.raises(SingularEvaluationError):
        freq_response_at(tf2, 2.0)


def test_poles_of_known_polynomial():
    tf = make_tf([1.0], [1.0, 3.0, 2.0])  # (s + 1)(s + 2)
    roots = np.sort_complex(poles(tf))
    assert np.allclose(roots, [-2.0, -1.0])


def test_poles_residual_check_on_stiff_system():
    # widely separated roots still pass the back-substitution check
    tf = make_tf([1.0], np.convolve([1.0, 0.4], [1.0, 2.5e3]))
    roots = np.sort_complex(poles(tf))
    assert np.allclose(roots, [-2.5e3, -0.4], rtol=1e-9)


def test_poles_of_constant_denominator():
    tf = make_tf([2.0], [4.0])
    assert poles(tf).size == 0
    assert dc_gain(tf) == pytest.approx(0.5)


def test_dc_gain():
    tf = make_tf([3.0], [1.0, 3.0, 2.0])
    assert dc_gain(tf) == pytest.approx(1.5)
