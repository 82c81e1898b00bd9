"""Time-domain model of the coupled drive with voltage saturation.

The plant integrates the motor electrical/mechanical equations, the gear
stage and the compliant coupling with a hard clamp on the commanded
voltage.  Three output-side modes:

``locked-output``     hip fixed at zero; torque benchmarks
``passive-backdrive`` hip trajectory prescribed; the voltage input remains
                      available (the backdrive benchmark drives it with 0)
``coupled-human``     hip is a state driven by the coupling torque and an
                      exogenous muscle torque

State layout: [i (include_L only), theta_m, theta_m_rate,
theta_h, theta_h_rate (coupled only)].

The hot loops are numba kernels; the same compiled derivative backs the
generic RK4 integrator through Plant.as_ode(), so there is exactly one
implementation of the dynamics.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit
from scipy import signal as _signal

from ..errors import ConfigurationError, DivergenceError, InvalidArgumentError
from ..lti.frf import fundamental_phasor  # noqa: F401  (re-exported for tests)
from ..lti.integrate import STABILITY_MARGIN
from ..lti.signals import ChirpSpec, chirp_rate, chirp_value
from ..lti.tf import freq_response_at
from ..lti.trace import Trace
from .analysis import g2_tf
from .params import ActuatorSpec, HumanParams

MODES = ("locked-output", "passive-backdrive", "coupled-human")

# default step = (margin / 2) / fastest eigenvalue: factor-2 headroom under
# the integrator's own |lambda|*dt < margin check
_DT_SAFETY = 0.5


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _deriv(x, dx, v_cmd, thh_in, thhd_in, taul,
           R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
           include_L, coupled):
    """Clamped-voltage dynamics; fills dx and returns tau_a."""
    base = 1 if include_L else 0
    th_m = x[base]
    thd_m = x[base + 1]
    if coupled:
        thh = x[base + 2]
        thhd = x[base + 3]
    else:
        thh = thh_in
        thhd = thhd_in

    v = v_cmd
    if v > vmax:
        v = vmax
    elif v < -vmax:
        v = -vmax

    if include_L:
        cur = x[0]
        dx[0] = (v - kb * thd_m - R * cur) / L
    else:
        cur = (v - kb * thd_m) / R
    tau_m = kt * cur

    tau_a = bc * (thd_m / ng - thhd) + kc * (th_m / ng - thh)
    dx[base] = thd_m
    dx[base + 1] = (tau_m - bm * thd_m - tau_a / ng) / Jm
    if coupled:
        dx[base + 2] = thhd
        dx[base + 3] = (taul + tau_a) / Jh
    return tau_a


@njit(cache=True)
def _rk4_arrays(v_half, thh_half, thhd_half, taul_half,
                R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
                include_L, coupled, x0, dt, n_steps):
    """Open-loop RK4 with inputs sampled on the half-step grid.

    Returns (states, tau_a, current, v_applied, fail_step); fail_step is -1
    on success, else the index of the first non-finite state.
    """
    nx = x0.size
    states = np.empty((n_steps + 1, nx))
    tau_tr = np.empty(n_steps + 1)
    i_tr = np.empty(n_steps + 1)
    v_tr = np.empty(n_steps + 1)
    k1 = np.empty(nx)
    k2 = np.empty(nx)
    k3 = np.empty(nx)
    k4 = np.empty(nx)
    xt = np.empty(nx)
    x = x0.copy()
    base = 1 if include_L else 0
    fail = -1

    for k in range(n_steps + 1):
        j = 2 * k
        if coupled:
            thh0 = 0.0
            thhd0 = 0.0
            tl0 = taul_half[j]
        else:
            thh0 = thh_half[j]
            thhd0 = thhd_half[j]
            tl0 = 0.0
        v0 = v_half[j]
        va = v0
        if va > vmax:
            va = vmax
        elif va < -vmax:
            va = -vmax
        tau_tr[k] = _deriv(x, k1, v0, thh0, thhd0, tl0,
                           R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
                           include_L, coupled)
        if include_L:
            i_tr[k] = x[0]
        else:
            i_tr[k] = (va - kb * x[base + 1]) / R
        v_tr[k] = va
        for i in range(nx):
            states[k, i] = x[i]
        if k == n_steps:
            break

        if coupled:
            thhh = 0.0
            thhdh = 0.0
            thh1 = 0.0
            thhd1 = 0.0
            tlh = taul_half[j + 1]
            tl1 = taul_half[j + 2]
        else:
            thhh = thh_half[j + 1]
            thhdh = thhd_half[j + 1]
            thh1 = thh_half[j + 2]
            thhd1 = thhd_half[j + 2]
            tlh = 0.0
            tl1 = 0.0
        vh = v_half[j + 1]
        v1 = v_half[j + 2]

        for i in range(nx):
            xt[i] = x[i] + 0.5 * dt * k1[i]
        _deriv(xt, k2, vh, thhh, thhdh, tlh, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        for i in range(nx):
            xt[i] = x[i] + 0.5 * dt * k2[i]
        _deriv(xt, k3, vh, thhh, thhdh, tlh, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        for i in range(nx):
            xt[i] = x[i] + dt * k3[i]
        _deriv(xt, k4, v1, thh1, thhd1, tl1, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        ok = True
        for i in range(nx):
            x[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(x[i]):
                ok = False
        if not ok:
            fail = k + 1
            for i in range(nx):
                states[k + 1:, i] = np.nan
            tau_tr[k + 1:] = np.nan
            i_tr[k + 1:] = np.nan
            v_tr[k + 1:] = np.nan
            break
    return states, tau_tr, i_tr, v_tr, fail


@njit(cache=True)
def _pi_update(e, ref, integ, dt, kp, ki, ff, integ_cap, vmax):
    """One conditional anti-windup PI update; returns (V_clamped, integ_new)."""
    integ_new = integ + e * dt
    u = ff * ref + kp * e + ki * integ_new
    if (u > vmax or u < -vmax) and e * u > 0.0:
        integ_new = integ
    if ki > 0.0:
        cap = integ_cap / ki
        if integ_new > cap:
            integ_new = cap
        elif integ_new < -cap:
            integ_new = -cap
    u = ff * ref + kp * e + ki * integ_new
    if u > vmax:
        u = vmax
    elif u < -vmax:
        u = -vmax
    return u, integ_new


@njit(cache=True)
def _rk4_closed(ref, thh_half, thhd_half, taul_half,
                R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
                include_L, coupled, kp, ki, ff, integ_cap,
                x0, dt, n_steps):
    """PI torque loop around the plant; the command is held over each step.

    ref holds the torque reference at every step boundary (n_steps + 1).
    Returns (states, tau_a, v_cmd, fail_step).
    """
    nx = x0.size
    states = np.empty((n_steps + 1, nx))
    tau_tr = np.empty(n_steps + 1)
    v_tr = np.empty(n_steps + 1)
    k1 = np.empty(nx)
    k2 = np.empty(nx)
    k3 = np.empty(nx)
    k4 = np.empty(nx)
    xt = np.empty(nx)
    x = x0.copy()
    integ = 0.0
    fail = -1

    for k in range(n_steps + 1):
        j = 2 * k
        if coupled:
            thh0 = 0.0
            thhd0 = 0.0
            tl0 = taul_half[j]
        else:
            thh0 = thh_half[j]
            thhd0 = thhd_half[j]
            tl0 = 0.0
        tau_meas = _deriv(x, k1, 0.0, thh0, thhd0, tl0,
                          R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
                          include_L, coupled)
        e = ref[k] - tau_meas
        v, integ = _pi_update(e, ref[k], integ, dt, kp, ki, ff, integ_cap, vmax)
        tau_tr[k] = tau_meas
        v_tr[k] = v
        for i in range(nx):
            states[k, i] = x[i]
        if k == n_steps:
            break

        if coupled:
            thhh = 0.0
            thhdh = 0.0
            thh1 = 0.0
            thhd1 = 0.0
            tlh = taul_half[j + 1]
            tl1 = taul_half[j + 2]
        else:
            thhh = thh_half[j + 1]
            thhdh = thhd_half[j + 1]
            thh1 = thh_half[j + 2]
            thhd1 = thhd_half[j + 2]
            tlh = 0.0
            tl1 = 0.0

        _deriv(x, k1, v, thh0, thhd0, tl0, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        for i in range(nx):
            xt[i] = x[i] + 0.5 * dt * k1[i]
        _deriv(xt, k2, v, thhh, thhdh, tlh, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        for i in range(nx):
            xt[i] = x[i] + 0.5 * dt * k2[i]
        _deriv(xt, k3, v, thhh, thhdh, tlh, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        for i in range(nx):
            xt[i] = x[i] + dt * k3[i]
        _deriv(xt, k4, v, thh1, thhd1, tl1, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, coupled)
        ok = True
        for i in range(nx):
            x[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(x[i]):
                ok = False
        if not ok:
            fail = k + 1
            for i in range(nx):
                states[k + 1:, i] = np.nan
            tau_tr[k + 1:] = np.nan
            v_tr[k + 1:] = np.nan
            break
    return states, tau_tr, v_tr, fail


@njit(cache=True)
def _frf_sine(drive_motion, closed_loop, amp, f_hz,
              R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
              include_L, kp, ki, ff, integ_cap,
              m, n_settle, n_meas, dt):
    """Stepped-sine probe with in-place fundamental correlation.

    drive_motion False, closed_loop False: V = amp sin(wt), hip locked
    drive_motion True:                     hip = amp sin(wt), V = 0
    closed_loop True:                      tau_ref = amp sin(wt), hip locked

    dt*m equals one drive period exactly.  Returns (c, s, fail_step) where
    c + j s is the tau_a fundamental phasor against the sin drive.
    """
    w = 2.0 * math.pi * f_hz
    nx = 3 if include_L else 2
    x = np.zeros(nx)
    k1 = np.empty(nx)
    k2 = np.empty(nx)
    k3 = np.empty(nx)
    k4 = np.empty(nx)
    xt = np.empty(nx)
    total = (n_settle + n_meas) * m
    meas_start = n_settle * m
    c = 0.0
    s = 0.0
    integ = 0.0

    for k in range(total):
        t = k * dt
        th = k * (2.0 * math.pi / m)  # drive phase, exact in cycle count
        sin_t = math.sin(th)
        cos_t = math.cos(th)
        if drive_motion:
            thh0 = amp * sin_t
            thhd0 = amp * w * cos_t
            v = 0.0
        else:
            thh0 = 0.0
            thhd0 = 0.0
            v = amp * sin_t
        # tau_a depends only on the state and hip motion, not on v
        tau_now = _deriv(x, k1, 0.0, thh0, thhd0, 0.0,
                         R, L, kt, kb, bm, Jm, ng, kc, bc, Jh, vmax,
                         include_L, False)
        if closed_loop:
            refk = amp * sin_t
            e = refk - tau_now
            v, integ = _pi_update(e, refk, integ, dt, kp, ki, ff, integ_cap, vmax)

        if k >= meas_start:
            c += tau_now * sin_t
            s += tau_now * cos_t

        # stage inputs: held command for the closed loop, true waveform else
        th_h_ = th + math.pi / m
        th_1_ = th + 2.0 * math.pi / m
        if drive_motion:
            thhh = amp * math.sin(th_h_)
            thhdh = amp * w * math.cos(th_h_)
            thh1 = amp * math.sin(th_1_)
            thhd1 = amp * w * math.cos(th_1_)
            vh = 0.0
            v1 = 0.0
        else:
            thhh = 0.0
            thhdh = 0.0
            thh1 = 0.0
            thhd1 = 0.0
            if closed_loop:
                vh = v
                v1 = v
            else:
                vh = amp * math.sin(th_h_)
                v1 = amp * math.sin(th_1_)

        _deriv(x, k1, v, thh0, thhd0, 0.0, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, False)
        for i in range(nx):
            xt[i] = x[i] + 0.5 * dt * k1[i]
        _deriv(xt, k2, vh, thhh, thhdh, 0.0, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, False)
        for i in range(nx):
            xt[i] = x[i] + 0.5 * dt * k2[i]
        _deriv(xt, k3, vh, thhh, thhdh, 0.0, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, False)
        for i in range(nx):
            xt[i] = x[i] + dt * k3[i]
        _deriv(xt, k4, v1, thh1, thhd1, 0.0, R, L, kt, kb, bm, Jm, ng, kc, bc,
               Jh, vmax, include_L, False)
        ok = True
        for i in range(nx):
            x[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(x[i]):
                ok = False
        if not ok:
            return 0.0, 0.0, k + 1
    n_samples = n_meas * m
    return 2.0 * c / n_samples, 2.0 * s / n_samples, -1


# ---------------------------------------------------------------------------
# python-side wrapper
# ---------------------------------------------------------------------------

def _sample_half_grid(fn, n_steps: int, dt: float) -> np.ndarray:
    """Evaluate fn on the RK4 half-step grid (2 n_steps + 1 points)."""
    t = np.arange(2 * n_steps + 1) * (0.5 * dt)
    if fn is None:
        return np.zeros(t.size)
    try:
        out = np.asarray(fn(t), dtype=float)
        if out.shape == t.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(ti)) for ti in t])


class Plant:
    """Nonlinear saturated drive model bound to one output-side mode."""

    def __init__(self, spec: ActuatorSpec, mode: str,
                 human: Optional[HumanParams] = None, include_L: bool = False):
        if mode not in MODES:
            raise InvalidArgumentError(f"unknown mode {mode!r}; expected one of {MODES}")
        human = human if human is not None else HumanParams()
        if mode == "passive-backdrive" and human.theta_h is None:
            raise ConfigurationError(
                "passive-backdrive mode needs a prescribed theta_h trajectory"
            )
        if mode == "coupled-human" and human.theta_h is not None:
            raise ConfigurationError(
                "coupled-human mode integrates theta_h; a prescribed trajectory "
                "cannot be active at the same time"
            )
        self.spec = spec
        self.mode = mode
        self.human = human
        self.include_L = include_L
        if include_L and spec.motor.L <= 0.0:
            raise InvalidArgumentError("include_L requires a positive winding inductance")

    # -- structure ---------------------------------------------------------

    @property
    def coupled(self) -> bool:
        return self.mode == "coupled-human"

    @property
    def state_names(self) -> tuple:
        names = ("current",) if self.include_L else ()
        names = names + ("theta_m", "theta_m_rate")
        if self.coupled:
            names = names + ("theta_h", "theta_h_rate")
        return names

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    def _params(self) -> tuple:
        m, tr = self.spec.motor, self.spec.transmission
        return (m.R, m.L if m.L > 0.0 else 1.0, m.k_t, m.k_b, m.b_m, m.J_m,
                tr.n, tr.k_c, tr.b_c, self.human.J_h, m.V_max)

    def linear_matrix(self) -> np.ndarray:
        """State matrix of the model with the clamp inactive."""
        m, tr = self.spec.motor, self.spec.transmission
        base = 1 if self.include_L else 0
        nx = self.n_states
        A = np.zeros((nx, nx))
        if self.include_L:
            A[0, 0] = -m.R / m.L
            A[0, base + 1] = -m.k_b / m.L
            em_damp = 0.0
        else:
            em_damp = m.k_t * m.k_b / m.R
        A[base, base + 1] = 1.0
        # J_m theta_m'' = tau_m - b_m theta_m' - tau_a / n
        A[base + 1, base] = -tr.k_c / (tr.n ** 2 * m.J_m)
        A[base + 1, base + 1] = -(m.b_m + em_damp + tr.b_c / tr.n ** 2) / m.J_m
        if self.include_L:
            A[base + 1, 0] = m.k_t / m.J_m
        if self.coupled:
            A[base + 1, base + 2] = tr.k_c / (tr.n * m.J_m)
            A[base + 1, base + 3] = tr.b_c / (tr.n * m.J_m)
            A[base + 2, base + 3] = 1.0
            J_h = self.human.J_h
            A[base + 3, base] = tr.k_c / (tr.n * J_h)
            A[base + 3, base + 1] = tr.b_c / (tr.n * J_h)
            A[base + 3, base + 2] = -tr.k_c / J_h
            A[base + 3, base + 3] = -tr.b_c / J_h
        return A

    def stability_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.linear_matrix())

    def default_dt(self) -> float:
        worst = float(np.max(np.abs(self.stability_eigenvalues())))
        return _DT_SAFETY * STABILITY_MARGIN / worst

    def initial_state(self) -> np.ndarray:
        return np.zeros(self.n_states)

    # -- simulation --------------------------------------------------------

    def _motion_arrays(self, n_steps: int, dt: float):
        if self.coupled:
            zero = np.zeros(1)
            taul = _sample_half_grid(self.human.tau_l, n_steps, dt)
            return zero, zero, taul
        if self.mode == "locked-output":
            z = np.zeros(2 * n_steps + 1)
            return z, z, np.zeros(1)
        thh = _sample_half_grid(self.human.theta_h, n_steps, dt)
        thhd = _sample_half_grid(self.human.theta_h_rate, n_steps, dt)
        return thh, thhd, np.zeros(1)

    def _wrap_trace(self, states, tau_tr, i_tr, v_tr, dt, fail):
        if fail >= 0:
            raise DivergenceError(
                f"plant state went non-finite at t = {fail * dt:.6g} s",
                where=fail * dt,
            )
        tr = self.spec.transmission
        channels = {name: states[:, i] for i, name in enumerate(self.state_names)}
        channels["theta_2"] = channels["theta_m"] / tr.n
        channels["tau_a"] = tau_tr
        channels["tau_2"] = tau_tr
        channels["tau_1"] = tau_tr / tr.n
        if i_tr is not None and not self.include_L:
            channels["current"] = i_tr
        if v_tr is not None:
            channels["v_applied"] = v_tr
        if not self.coupled and self.mode == "passive-backdrive":
            n = states.shape[0]
            t = np.arange(n) * dt
            channels["theta_h"] = np.asarray(self.human.theta_h(t), dtype=float) \
                if _vectorized(self.human.theta_h, t) else np.array(
                    [self.human.theta_h(ti) for ti in t])
            channels["theta_h_rate"] = np.asarray(self.human.theta_h_rate(t), dtype=float) \
                if _vectorized(self.human.theta_h_rate, t) else np.array(
                    [self.human.theta_h_rate(ti) for ti in t])
        return Trace(dt=dt, channels=channels)

    def run(self, voltage: Optional[Callable] = None, duration: float = 1.0,
            dt: Optional[float] = None) -> Trace:
        """Open-loop simulation; ``voltage`` is the commanded V(t) [V]."""
        dt = dt if dt is not None else self.default_dt()
        n_steps = int(round(duration / dt))
        v_half = _sample_half_grid(voltage, n_steps, dt)
        thh, thhd, taul = self._motion_arrays(n_steps, dt)
        states, tau_tr, i_tr, v_tr, fail = _rk4_arrays(
            v_half, thh, thhd, taul, *self._params(),
            self.include_L, self.coupled, self.initial_state(), dt, n_steps)
        return self._wrap_trace(states, tau_tr, i_tr, v_tr, dt, fail)

    def run_closed_loop(self, gains, tau_ref, duration: float,
                        dt: Optional[float] = None) -> Trace:
        """PI torque tracking; tau_ref is a function of time or a per-step array."""
        dt = dt if dt is not None else self.default_dt()
        n_steps = int(round(duration / dt))
        if callable(tau_ref):
            t = np.arange(n_steps + 1) * dt
            ref = np.array([float(tau_ref(ti)) for ti in t]) \
                if not _vectorized(tau_ref, t) else np.asarray(tau_ref(t), dtype=float)
        else:
            ref = np.asarray(tau_ref, dtype=float)
            if ref.size != n_steps + 1:
                raise InvalidArgumentError(
                    f"tau_ref array must hold {n_steps + 1} samples, got {ref.size}")
        thh, thhd, taul = self._motion_arrays(n_steps, dt)
        states, tau_tr, v_tr, fail = _rk4_closed(
            ref, thh, thhd, taul, *self._params(),
            self.include_L, self.coupled,
            gains.kp, gains.ki, gains.feedforward, gains.integrator_limit,
            self.initial_state(), dt, n_steps)
        if self.include_L:
            i_tr = None
        else:
            m = self.spec.motor
            base = 0
            i_tr = (v_tr - m.k_b * states[:, base + 1]) / m.R
        trace = self._wrap_trace(states, tau_tr, i_tr, v_tr, dt, fail)
        trace.channels["tau_ref"] = ref
        return trace

    def as_ode(self, voltage: Optional[Callable] = None):
        """Adapter for the reference integrator; shares the compiled derivative."""
        return _PlantOde(self, voltage)

    # -- stepped-sine runners ------------------------------------------------

    def sine_runner(self, drive: str = "voltage", dt: Optional[float] = None):
        """measure_frf runner: tau_a response to a V or hip-angle sine."""
        if drive not in ("voltage", "motion"):
            raise InvalidArgumentError("drive must be 'voltage' or 'motion'")
        if self.coupled:
            raise ConfigurationError("stepped-sine probes need a non-coupled mode")
        drive_motion = drive == "motion"
        dt_cap = dt if dt is not None else self.default_dt()
        params = self._params()

        def run(f_hz, amplitude, settle_cycles, measure_cycles):
            period = 1.0 / f_hz
            m = max(64, math.ceil(period / dt_cap))
            dt_f = period / m
            c, s, fail = _frf_sine(drive_motion, False, amplitude, f_hz,
                                   *params, self.include_L,
                                   0.0, 0.0, 0.0, 0.0,
                                   m, settle_cycles, measure_cycles, dt_f)
            if fail >= 0:
                raise DivergenceError(
                    f"plant diverged after {fail} steps", where=fail * dt_f)
            return complex(c, s)

        return run

    def closed_loop_sine_runner(self, gains, dt: Optional[float] = None):
        """measure_frf runner for the PI loop: tau_a response to a tau_ref sine."""
        if self.mode != "locked-output":
            raise ConfigurationError("closed-loop probes use the locked-output mode")
        dt_cap = dt if dt is not None else self.default_dt()
        params = self._params()

        def run(f_hz, amplitude, settle_cycles, measure_cycles):
            period = 1.0 / f_hz
            m = max(64, math.ceil(period / dt_cap))
            dt_f = period / m
            c, s, fail = _frf_sine(False, True, amplitude, f_hz,
                                   *params, self.include_L,
                                   gains.kp, gains.ki, gains.feedforward,
                                   gains.integrator_limit,
                                   m, settle_cycles, measure_cycles, dt_f)
            if fail >= 0:
                raise DivergenceError(
                    f"closed loop diverged after {fail} steps", where=fail * dt_f)
            return complex(c, s)

        return run


def _vectorized(fn, t: np.ndarray) -> bool:
    try:
        out = fn(t[:2])
    except (TypeError, ValueError):
        return False
    return np.shape(out) == t[:2].shape


class _PlantOde:
    """Plant exposed through the generic integrator protocol."""

    def __init__(self, plant: Plant, voltage):
        self.plant = plant
        self.voltage = voltage if voltage is not None else (lambda t: 0.0)
        self.n_states = plant.n_states
        self.state_names = plant.state_names
        self._dx = np.empty(plant.n_states)
        self._params = plant._params()

    def initial_state(self):
        return self.plant.initial_state()

    def stability_eigenvalues(self):
        return self.plant.stability_eigenvalues()

    def _inputs(self, t):
        h = self.plant.human
        if self.plant.coupled:
            return 0.0, 0.0, (h.tau_l(t) if h.tau_l is not None else 0.0)
        if self.plant.mode == "locked-output":
            return 0.0, 0.0, 0.0
        return float(h.theta_h(t)), float(h.theta_h_rate(t)), 0.0

    def deriv(self, t, x):
        thh, thhd, taul = self._inputs(t)
        dx = np.empty_like(x)
        _deriv(x, dx, float(self.voltage(t)), thh, thhd, taul,
               *self._params, self.plant.include_L, self.plant.coupled)
        return dx

    def outputs(self, t, x):
        thh, thhd, taul = self._inputs(t)
        tau_a = _deriv(x, self._dx, float(self.voltage(t)), thh, thhd, taul,
                       *self._params, self.plant.include_L, self.plant.coupled)
        return {"tau_a": float(tau_a)}


def build_plant(spec: ActuatorSpec, mode: str, human: Optional[HumanParams] = None,
                include_L: bool = False) -> Plant:
    """Construct the time-domain plant for one output-side mode."""
    return Plant(spec, mode, human=human, include_L=include_L)


# ---------------------------------------------------------------------------
# passive backdrive: exact linear stepping
# ---------------------------------------------------------------------------

@dataclass
class BackdriveResult:
    """Peak coupling torque under imposed hip motion with the supply off."""

    peak_nm: float
    peak_time_s: float
    predicted_nm: float   # |G2(j 2 pi f1)| * amplitude, terminal-frequency value
    trace: Trace


def _passive_matrices(spec: ActuatorSpec, include_L: bool):
    """State-space form of the V = 0 plant driven by [theta_h, theta_h_rate]."""
    m, tr = spec.motor, spec.transmission
    n = tr.n
    if include_L:
        A = np.array([
            [-m.R / m.L, 0.0, -m.k_b / m.L],
            [0.0, 0.0, 1.0],
            [m.k_t / m.J_m, -tr.k_c / (n ** 2 * m.J_m),
             -(m.b_m + tr.b_c / n ** 2) / m.J_m],
        ])
        B = np.array([
            [0.0, 0.0],
            [0.0, 0.0],
            [tr.k_c / (n * m.J_m), tr.b_c / (n * m.J_m)],
        ])
        C = np.array([[0.0, tr.k_c / n, tr.b_c / n]])
    else:
        em_damp = m.k_t * m.k_b / m.R
        A = np.array([
            [0.0, 1.0],
            [-tr.k_c / (n ** 2 * m.J_m),
             -(m.b_m + em_damp + tr.b_c / n ** 2) / m.J_m],
        ])
        B = np.array([
            [0.0, 0.0],
            [tr.k_c / (n * m.J_m), tr.b_c / (n * m.J_m)],
        ])
        C = np.array([[tr.k_c / n, tr.b_c / n]])
    D = np.array([[-tr.k_c, -tr.b_c]])
    return A, B, C, D


def backdrive_peak(spec: ActuatorSpec, drive: ChirpSpec,
                   include_L: bool = False, dt: Optional[float] = None) -> BackdriveResult:
    """Peak |tau_a| under a hip-angle sweep with V = 0, plus the analytic check.

    The passive plant is linear (the clamp is idle at V = 0), so it is
    stepped with the exact first-order-hold discretisation instead of RK4.
    That keeps pathologically stiff configurations (n -> 0 reflects the
    coupling through 1/n^2) as cheap and exact as the nominal presets.
    The companion number ``predicted_nm`` is the frequency-domain value at
    the sweep's terminal frequency; slow sweeps land within a few percent.
    """
    if drive.amplitude == 0.0:
        raise InvalidArgumentError("backdrive drive amplitude must be nonzero")
    if dt is None:
        f_ref = max(drive.f0_hz, drive.f1_hz, 0.1)
        dt = 1.0 / (1000.0 * f_ref)
    n_steps = int(round(drive.duration_s / dt))
    t = np.arange(n_steps + 1) * dt
    theta = chirp_value(drive, t)
    theta_rate = chirp_rate(drive, t)
    A, B, C, D = _passive_matrices(spec, include_L)
    u = np.column_stack([theta, theta_rate])
    _, tau_a, states = _signal.lsim((A, B, C, D), u, t)
    states = np.atleast_2d(states)

    k = int(np.argmax(np.abs(tau_a)))
    f_end = max(drive.f0_hz, drive.f1_hz)
    predicted = abs(freq_response_at(g2_tf(spec), 2.0 * math.pi * f_end)) * abs(drive.amplitude)

    tr = spec.transmission
    base = 1 if include_L else 0
    channels = {
        "theta_m": states[:, base],
        "theta_m_rate": states[:, base + 1],
        "theta_2": states[:, base] / tr.n,
        "theta_h": theta,
        "theta_h_rate": theta_rate,
        "tau_a": tau_a,
        "tau_2": tau_a,
        "tau_1": tau_a / tr.n,
    }
    if include_L:
        channels["current"] = states[:, 0]
    else:
        channels["current"] = -spec.motor.k_b * states[:, 1] / spec.motor.R
    trace = Trace(dt=dt, channels=channels)
    return BackdriveResult(peak_nm=float(np.abs(tau_a[k])), peak_time_s=float(t[k]),
                           predicted_nm=float(predicted), trace=trace)
