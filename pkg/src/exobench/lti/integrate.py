"""Fixed-step 4th-order Runge-Kutta integration.

This is the reference integrator: simple, deterministic, and shared by the
property tests.  Performance-critical simulations (stepped-sine sweeps,
closed-loop tracking) use compiled kernels that implement the identical
scheme; the equivalence is covered by tests.
"""

import numpy as np

from ..errors import DivergenceError, StepTooLargeError
from .ss import StateSpace
from .trace import Trace

# |lambda|*dt must stay below this margin; RK4's stability boundary on the
# real axis is ~2.78 but accuracy degrades long before that.
STABILITY_MARGIN = 0.1


class _StateSpaceOde:
    """Binds a SISO StateSpace to an input signal u(t)."""

    def __init__(self, ss: StateSpace, u):
        self.ss = ss
        self.u = u if u is not None else (lambda t: 0.0)
        self.n_states = ss.n_states

    def initial_state(self):
        return np.zeros(self.n_states)

    def deriv(self, t, x):
        return self.ss.deriv(x, self.u(t))

    def outputs(self, t, x):
        return {"y": self.ss.output(x, self.u(t))}

    def stability_eigenvalues(self):
        return self.ss.stability_eigenvalues()


def check_step(system, dt: float) -> None:
    """Reject a step size that violates the eigenvalue margin.

    Systems may expose stability_eigenvalues(); those that do not (general
    nonlinear plants) are integrated on trust with the documented default
    step.
    """
    eig_fn = getattr(system, "stability_eigenvalues", None)
    if eig_fn is None:
        return
    eigs = eig_fn()
    if eigs is None or len(eigs) == 0:
        return
    worst = float(np.max(np.abs(eigs)))
    if worst * dt >= STABILITY_MARGIN:
        raise StepTooLargeError(
            f"dt = {dt:g} s too large: |lambda|*dt = {worst * dt:.3g} "
            f"exceeds the {STABILITY_MARGIN:g} margin (fastest eigenvalue {worst:.6g} 1/s)"
        )


def integrate(system, inputs=None, dt: float = 1e-4, duration: float = 1.0,
              x0=None) -> Trace:
    """Integrate a system with fixed-step RK4 and return the full trajectory.

    system   -- StateSpace (then ``inputs`` is a scalar signal u(t)) or any
                object with n_states, deriv(t, x), optional outputs(t, x),
                optional initial_state() and stability_eigenvalues()
    dt       -- step [s]; checked against the system eigenvalues when known
    duration -- total time [s]; the trace holds round(duration/dt)+1 samples

    Raises DivergenceError (with the failure time) as soon as any state
    sample goes non-finite.
    """
    if isinstance(system, StateSpace):
        system = _StateSpaceOde(system, inputs)
    check_step(system, dt)

    n_steps = int(round(duration / dt))
    if x0 is not None:
        x = np.array(x0, dtype=float)
    elif hasattr(system, "initial_state"):
        x = np.asarray(system.initial_state(), dtype=float)
    else:
        x = np.zeros(system.n_states)

    out_fn = getattr(system, "outputs", None)
    states = np.empty((n_steps + 1, x.size))
    states[0] = x
    out_names = []
    out_rows = None
    if out_fn is not None:
        first = out_fn(0.0, x)
        out_names = list(first)
        out_rows = np.empty((n_steps + 1, len(out_names)))
        out_rows[0] = [first[k] for k in out_names]

    f = system.deriv
    half = 0.5 * dt
    for k in range(n_steps):
        t = k * dt
        k1 = f(t, x)
        k2 = f(t + half, x + half * k1)
        k3 = f(t + half, x + half * k2)
        k4 = f(t + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(
                f"state went non-finite at t = {(k + 1) * dt:.6g} s",
                where=(k + 1) * dt,
            )
        states[k + 1] = x
        if out_fn is not None:
            row = out_fn((k + 1) * dt, x)
            out_rows[k + 1] = [row[k2_] for k2_ in out_names]

    channels = {f"x{i + 1}": states[:, i] for i in range(x.size)}
    state_names = getattr(system, "state_names", None)
    if state_names is not None:
        channels = {name: states[:, i] for i, name in enumerate(state_names)}
    for j, name in enumerate(out_names):
        channels[name] = out_rows[:, j]
    return Trace(dt=dt, channels=channels)
