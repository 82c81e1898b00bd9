"""Closed-form input/output maps of the coupled drive.

With the hip held still and the winding inductance neglected, eliminating
the motor states gives the characteristic polynomial

    d(s) = J_e s^2 + b_e s + k_e
    J_e  = n^2 J_m R
    b_e  = n^2 R b_m + n^2 k_b k_t + R b_c
    k_e  = R k_c

and the two single-input maps onto assistive torque tau_a:

    voltage path   G1(s) = n k_t (b_c s + k_c) / d(s)
    motion path    G2(s) = -(b_c s + k_c) n^2 (J_m R s^2 + (R b_m + k_b k_t) s) / d(s)

G2 is improper (degree 3 over 2): differentiating the imposed motion is
part of the physics.  It is evaluated on the imaginary axis or exercised in
the time domain through the Plant, never realised as a state-space system.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError
from ..lti.tf import TransferFunction, freq_response_at, make_tf
from .params import ActuatorSpec

LIMIT_CASES = ("n->0", "n=1", "n->inf")


@dataclass(frozen=True)
class DerivedParams:
    """Reduced constants of the locked-output drive (SI)."""

    J_e: float   # effective inertia coefficient [kg*m^2*ohm]
    b_e: float   # effective damping coefficient
    k_e: float   # effective stiffness coefficient
    omega_n: float  # undamped natural frequency sqrt(k_c / (n^2 J_m)) [rad/s]

    @property
    def omega_n_hz(self) -> float:
        return self.omega_n / (2.0 * math.pi)

    @property
    def char_poly(self) -> np.ndarray:
        """d(s) coefficients, descending powers."""
        return np.array([self.J_e, self.b_e, self.k_e])


def derived_params(spec: ActuatorSpec) -> DerivedParams:
    m, tr = spec.motor, spec.transmission
    n2 = tr.n * tr.n
    J_e = n2 * m.J_m * m.R
    b_e = n2 * m.R * m.b_m + n2 * m.k_b * m.k_t + m.R * tr.b_c
    k_e = m.R * tr.k_c
    omega_n = math.sqrt(tr.k_c / (n2 * m.J_m))
    return DerivedParams(J_e=J_e, b_e=b_e, k_e=k_e, omega_n=omega_n)


def g1_tf(spec: ActuatorSpec) -> TransferFunction:
    """Voltage-to-torque map, proper with degree (1, 2)."""
    m, tr = spec.motor, spec.transmission
    d = derived_params(spec)
    num = np.array([tr.n * m.k_t * tr.b_c, tr.n * m.k_t * tr.k_c])
    return make_tf(num, d.char_poly)


def _motion_numerator(spec: ActuatorSpec) -> np.ndarray:
    """-(b_c s + k_c) * n^2 * (J_m R s^2 + (R b_m + k_b k_t) s), descending."""
    m, tr = spec.motor, spec.transmission
    inner = np.array([m.J_m * m.R, m.R * m.b_m + m.k_b * m.k_t, 0.0])
    return np.convolve(np.array([tr.b_c, tr.k_c]), inner) * (-(tr.n * tr.n))


def g2_tf(spec: ActuatorSpec) -> TransferFunction:
    """Hip-motion-to-torque map; improper by construction (degree 3 over 2)."""
    d = derived_params(spec)
    return TransferFunction(_motion_numerator(spec), d.char_poly, allow_improper=True)


def limit_case_tf(spec: ActuatorSpec, case: str) -> TransferFunction:
    """Gear-ratio limit of the motion-to-torque map.

    n->0    reflected motor dynamics vanish: zero transfer
    n=1     direct drive, the map written out term by term
    n->inf  the coupling alone is felt: -(b_c s + k_c)
    """
    m, tr = spec.motor, spec.transmission
    if case == "n->0":
        return make_tf([0.0], [1.0])
    if case == "n->inf":
        return TransferFunction(np.array([-tr.b_c, -tr.k_c]), np.array([1.0]),
                                allow_improper=True)
    if case == "n=1":
        inner = np.array([m.J_m * m.R, m.R * m.b_m + m.k_b * m.k_t, 0.0])
        num = np.convolve(np.array([tr.b_c, tr.k_c]), inner) * (-1.0)
        den = np.array([
            m.J_m * m.R,
            m.R * m.b_m + m.k_b * m.k_t + m.R * tr.b_c,
            m.R * tr.k_c,
        ])
        return TransferFunction(num, den, allow_improper=True)
    raise InvalidArgumentError(f"unknown limit case {case!r}; expected one of {LIMIT_CASES}")


def output_impedance(spec: ActuatorSpec, omega: float) -> complex:
    """Torque per unit hip velocity, G2(j w)/(j w), with the analytic w=0 limit.

    At w=0 this is the low-speed backdrive friction coefficient
    -n^2 (b_m + k_b k_t / R): reflected rotor damping plus the
    short-circuit electromagnetic damping of the winding.
    """
    m, tr = spec.motor, spec.transmission
    if omega == 0.0:
        n2 = tr.n * tr.n
        return complex(-(n2 * (m.b_m + m.k_b * m.k_t / m.R)), 0.0)
    return freq_response_at(g2_tf(spec), omega) / (1j * omega)
