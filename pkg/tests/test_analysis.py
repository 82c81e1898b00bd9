"""Closed-form maps of the coupled drive: resonance, torque and motion paths."""

import math

import numpy as np
import pytest

from exobench.actuator.analysis import (
    LIMIT_CASES,
    derived_params,
    g1_tf,
    g2_tf,
    limit_case_tf,
    output_impedance,
)
from exobench.actuator.params import (
    ActuatorSpec,
    MotorParams,
    TransmissionParams,
)
from exobench.errors import InvalidArgumentError
from exobench.lti.tf import dc_gain, freq_response_at, poles

# frozen resonance oracles, sqrt(k_c / (n^2 J_m)) evaluated by hand [rad/s]
_OMEGA_N = {"qdd": 295.449660, "conventional": 105.117666, "sea": 6.2622429}


def _respec(spec, n):
    tr = spec.transmission
    return ActuatorSpec(label=f"{spec.label}-n{n:g}", motor=spec.motor,
                        transmission=TransmissionParams(n=n, k_c=tr.k_c,
                                                        b_c=tr.b_c))


def test_resonance_against_frozen_oracles(presets):
    for label, spec in presets.items():
        d = derived_params(spec)
        assert d.omega_n == pytest.approx(_OMEGA_N[label], rel=1e-6)
        m, tr = spec.motor, spec.transmission
        assert d.omega_n == pytest.approx(
            math.sqrt(tr.k_c / (tr.n ** 2 * m.J_m)), rel=1e-12)
        assert d.omega_n_hz == pytest.approx(d.omega_n / (2.0 * math.pi))


def test_reduced_coefficients(presets):
    for spec in presets.values():
        m, tr = spec.motor, spec.transmission
        d = derived_params(spec)
        n2 = tr.n ** 2
        assert d.J_e == pytest.approx(n2 * m.J_m * m.R, rel=1e-12)
        assert d.b_e == pytest.approx(
            n2 * m.R * m.b_m + n2 * m.k_b * m.k_t + m.R * tr.b_c, rel=1e-12)
        assert d.k_e == pytest.approx(m.R * tr.k_c, rel=1e-12)
        # the resonance is also the undamped root of the reduced polynomial
        assert d.omega_n == pytest.approx(math.sqrt(d.k_e / d.J_e), rel=1e-12)


def test_torque_path_dc_gain(presets):
    for spec in presets.values():
        m, tr = spec.motor, spec.transmission
        assert dc_gain(g1_tf(spec)) == pytest.approx(tr.n * m.k_t / m.R,
                                                     rel=1e-12)


def test_torque_path_poles_are_stable(presets):
    for spec in presets.values():
        roots = poles(g1_tf(spec))
        assert np.all(np.real(roots) < 0.0)


def test_motion_path_against_direct_arithmetic(qdd):
    # evaluate G2 by writing out the physics term by term, independently of
    # the polynomial plumbing
    m, tr = qdd.motor, qdd.transmission
    n = tr.n
    for w in (0.5, 2.0 * math.pi, 40.0, 400.0):
        s = 1j * w
        coupling = tr.b_c * s + tr.k_c
        rotor = m.J_m * m.R * s * s + (m.R * m.b_m + m.k_b * m.k_t) * s
        d = (n * n * m.J_m * m.R * s * s
             + (n * n * m.R * m.b_m + n * n * m.k_b * m.k_t + m.R * tr.b_c) * s
             + m.R * tr.k_c)
        expected = -coupling * n * n * rotor / d
        assert freq_response_at(g2_tf(qdd), w) == pytest.approx(expected,
                                                                rel=1e-10)
    # frozen magnitude oracle at 1 Hz
    assert abs(freq_response_at(g2_tf(qdd), 2.0 * math.pi)) == pytest.approx(
        88.5338, rel=1e-4)


def test_motion_path_is_improper(qdd):
    g2 = g2_tf(qdd)
    assert not g2.is_proper
    assert g2.num.size == 4
    assert g2.den.size == 3


def test_limit_case_zero_ratio(qdd):
    spec = _respec(qdd, 1e-3)
    g2 = g2_tf(spec)
    for w in (0.1, 1.0, 10.0):
        assert abs(freq_response_at(g2, w)) < 1e-3
    ref = limit_case_tf(qdd, "n->0")
    assert freq_response_at(ref, 1.0) == 0.0


def test_limit_case_unity_ratio_exact_coefficients(qdd):
    spec = _respec(qdd, 1.0)
    g2 = g2_tf(spec)
    ref = limit_case_tf(qdd, "n=1")
    assert np.array_equal(g2.num, ref.num)
    assert np.array_equal(g2.den, ref.den)


def test_limit_case_infinite_ratio(qdd):
    spec = _respec(qdd, 1e4)
    g2 = g2_tf(spec)
    ref = limit_case_tf(qdd, "n->inf")
    tr = qdd.transmission
    for w in np.logspace(-1.0, 1.0, 7):
        lim = freq_response_at(ref, w)
        assert lim == pytest.approx(-(tr.b_c * 1j * w + tr.k_c), rel=1e-12)
        assert abs(freq_response_at(g2, w)) == pytest.approx(abs(lim), rel=0.01)


def test_limit_case_validation(qdd):
    assert set(LIMIT_CASES) == {"n->0", "n=1", "n->inf"}
    with pytest.raises(InvalidArgumentError):
        limit_case_tf(qdd, "n=2")


def test_output_impedance_dc_identity(presets):
    # frozen low-speed backdrive coefficients [Nm*s/rad]
    oracle = {"qdd": -14.3106, "conventional": -30.5987, "sea": -306.531}
    for label, spec in presets.items():
        m, tr = spec.motor, spec.transmission
        z0 = output_impedance(spec, 0.0)
        assert z0.imag == 0.0
        assert z0.real == pytest.approx(
            -(tr.n ** 2) * (m.b_m + m.k_b * m.k_t / m.R), rel=1e-12)
        assert z0.real == pytest.approx(oracle[label], rel=1e-4)


def test_output_impedance_definition(qdd):
    for w in (0.3, 3.0, 30.0):
        z = output_impedance(qdd, w)
        assert z == pytest.approx(freq_response_at(g2_tf(qdd), w) / (1j * w),
                                  rel=1e-12)


def test_output_impedance_continuous_at_zero(qdd):
    z0 = output_impedance(qdd, 0.0)
    z_eps = output_impedance(qdd, 1e-6)
    assert z_eps.real == pytest.approx(z0.real, rel=1e-6)
