"""PI torque loop with feedforward and conditional anti-windup.

The controller commands motor voltage from the coupling-torque error:

    V = clamp(ff * tau_ref + kp * e + ki * int(e dt), +-V_max)

The integrator freezes whenever the unclamped command is saturated and the
current error would push it further into the clamp, and its contribution is
additionally capped at ``integrator_limit`` volts.

``tune_gains`` picks kp as the largest proportional gain that keeps a 45
degree phase margin: with the integral corner tied to the coupled resonance
(ki = kp * omega_n / 10) the loop phase is independent of kp, so the gain
crossover is placed at the first frequency where that phase falls to -135
degrees.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..actuator.analysis import derived_params, g1_tf
from ..actuator.params import ActuatorSpec
from ..errors import ConfigurationError, NumericFailureError
from ..lti.tf import TransferFunction, freq_response_at, make_tf

TARGET_PHASE_MARGIN_DEG = 45.0
INTEGRAL_CORNER_DIVISOR = 10.0


@dataclass(frozen=True)
class PiGains:
    """Torque-loop gains; volts per newton-metre flavoured."""

    kp: float                 # V/Nm
    ki: float                 # V/(Nm*s)
    feedforward: float = 0.0  # V/Nm
    integrator_limit: float = math.inf  # V

    def __post_init__(self):
        if self.kp < 0.0 or self.ki < 0.0:
            raise ConfigurationError("PI gains must be non-negative")
        if self.integrator_limit <= 0.0:
            raise ConfigurationError("integrator_limit must be positive")


def pi_step(error: float, reference: float, integrator: float, dt: float,
            gains: PiGains, v_max: float) -> Tuple[float, float]:
    """One controller update; returns (clamped voltage, new integrator state).

    The operation order matches the compiled closed-loop kernel exactly so
    both paths produce bit-identical commands.
    """
    integ_new = integrator + error * dt
    u = gains.feedforward * reference + gains.kp * error + gains.ki * integ_new
    if (u > v_max or u < -v_max) and error * u > 0.0:
        integ_new = integrator
    if gains.ki > 0.0:
        cap = gains.integrator_limit / gains.ki
        if integ_new > cap:
            integ_new = cap
        elif integ_new < -cap:
            integ_new = -cap
    u = gains.feedforward * reference + gains.kp * error + gains.ki * integ_new
    if u > v_max:
        u = v_max
    elif u < -v_max:
        u = -v_max
    return u, integ_new


def loop_phase_deg(spec: ActuatorSpec, omega: float) -> float:
    """Phase of the open torque loop at omega, for unit proportional gain.

    The integral corner follows ki/kp = omega_n / 10, which makes the loop
    phase independent of the proportional gain itself.
    """
    omega_n = derived_params(spec).omega_n
    g1 = freq_response_at(g1_tf(spec), omega)
    c1 = 1.0 + omega_n / (INTEGRAL_CORNER_DIVISOR * 1j * omega)
    return math.degrees(np.angle(c1 * g1))


def crossover_frequency(spec: ActuatorSpec) -> float:
    """First frequency [rad/s] where the loop phase reaches -135 degrees."""
    omega_n = derived_params(spec).omega_n
    target = -(180.0 - TARGET_PHASE_MARGIN_DEG)
    lo = omega_n  # at the resonance the phase is well above -135 degrees
    if loop_phase_deg(spec, lo) <= target:
        lo = omega_n * 1e-3
    hi = lo
    for _ in range(240):
        cand = hi * 1.2
        if loop_phase_deg(spec, cand) <= target:
            lo = hi
            hi = cand
            break
        hi = cand
    else:
        raise NumericFailureError(
            "loop phase never reaches -135 degrees; cannot place the crossover")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if loop_phase_deg(spec, mid) <= target:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.0 + 1e-12:
            break
    return math.sqrt(lo * hi)


def tune_gains(spec: ActuatorSpec) -> PiGains:
    """Gains giving a 45 degree phase margin with unity feedforward inversion."""
    omega_n = derived_params(spec).omega_n
    wc = crossover_frequency(spec)
    g1 = freq_response_at(g1_tf(spec), wc)
    c1 = 1.0 + omega_n / (INTEGRAL_CORNER_DIVISOR * 1j * wc)
    kp = 1.0 / abs(c1 * g1)
    ki = kp * omega_n / INTEGRAL_CORNER_DIVISOR
    m, tr = spec.motor, spec.transmission
    ff = m.R / (tr.n * m.k_t)
    return PiGains(kp=kp, ki=ki, feedforward=ff, integrator_limit=m.V_max)


def closed_loop_tf(spec: ActuatorSpec, gains: PiGains) -> TransferFunction:
    """Torque tracking transfer function of the linear loop (clamp inactive).

    With plant G1 and controller C = kp + ki/s plus reference feedforward ff,
    the closed loop maps tau_ref to tau_a through

        T = G1 (ff + C) / (1 + G1 C)
    """
    g1 = g1_tf(spec)
    num_ffc = np.array([gains.feedforward + gains.kp, gains.ki])
    num_c = np.array([gains.kp, gains.ki])
    s_poly = np.array([1.0, 0.0])
    num = np.convolve(g1.num, num_ffc)
    den = np.polyadd(np.convolve(g1.den, s_poly), np.convolve(g1.num, num_c))
    return make_tf(num, den)


def gains_from_spec(spec: ActuatorSpec) -> PiGains:
    """Stored control gains from a loaded parameter set, tuning if absent."""
    if spec.control is None:
        return tune_gains(spec)
    raw = dict(spec.control)
    kp = raw["kp"]
    ki = raw["ki"]
    ff = raw.get("feedforward")
    if ff is None:
        m, tr = spec.motor, spec.transmission
        ff = m.R / (tr.n * m.k_t)
    limit = raw.get("integrator_limit")
    if limit is None:
        limit = spec.motor.V_max
    return PiGains(kp=kp, ki=ki, feedforward=ff, integrator_limit=limit)


def phase_margin_deg(spec: ActuatorSpec, gains: PiGains,
                     omega: Optional[float] = None) -> float:
    """Phase margin of kp/ki around the analytic plant at the gain crossover."""
    if omega is None:
        # locate |L| = 1 by bisection on a decade-spanning bracket
        def mag(w):
            g1 = freq_response_at(g1_tf(spec), w)
            return abs((gains.kp + gains.ki / (1j * w)) * g1)

        lo, hi = 1e-3, 1e-3
        for _ in range(80):
            hi *= 2.0
            if mag(hi) < 1.0:
                break
        else:
            raise NumericFailureError("loop gain never falls below unity")
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if mag(mid) < 1.0:
                hi = mid
            else:
                lo = mid
            if hi / lo < 1.0 + 1e-12:
                break
        omega = math.sqrt(lo * hi)
    g1 = freq_response_at(g1_tf(spec), omega)
    lphase = math.degrees(np.angle((gains.kp + gains.ki / (1j * omega)) * g1))
    return 180.0 + lphase
