"""
Fixed-step explicit ODE integration for piecewise-smooth right-hand sides.
"""

import logging
import time
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .exceptions import SimulationDivergenceError
from .models import INTEGRATORS, OdeSystem, Recorder, SimPlan, Trajectory
from .signals import sample_signal

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]


def _checked(t: float, new_state: np.ndarray) -> np.ndarray:
    # a non-finite rhs output always leaves a non-finite entry in the new state
    if not np.isfinite(new_state).all():
        raise SimulationDivergenceError(t)
    return new_state


def _rhs(sys: OdeSystem, t: float, state: np.ndarray) -> np.ndarray:
    return np.asarray(sys.rhs(t, state), dtype=float)


def step_euler(sys: OdeSystem, t: float, state: np.ndarray, dt: float) -> np.ndarray:
    """One explicit Euler step: state + dt * rhs(t, state)."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    state = np.asarray(state, dtype=float)
    return _checked(t, state + dt * _rhs(sys, t, state))


def step_rk4(sys: OdeSystem, t: float, state: np.ndarray, dt: float) -> np.ndarray:
    """One classical 4-stage Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    state = np.asarray(state, dtype=float)
    half = 0.5 * dt
    k1 = _rhs(sys, t, state)
    k2 = _rhs(sys, t + half, state + half * k1)
    k3 = _rhs(sys, t + half, state + half * k2)
    k4 = _rhs(sys, t + dt, state + dt * k3)
    return _checked(t, state + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4))


STEPPERS = {
    "euler": step_euler,
    "rk4": step_rk4,
}


def simulate(sys: OdeSystem, x0: Optional[Sequence[float]], plan: SimPlan,
             method: str = "rk4", recorder: Optional[Recorder] = None,
             progress: Optional[ProgressCallback] = None) -> Trajectory:
    """
    Integrate `sys` over `plan` and record every `plan.record_stride`-th step.

    Recorded columns are the recorder's state entries plus `true.d<order>`
    columns of the recorder's truth signal, evaluated at the recorded times.
    Divergence raises SimulationDivergenceError carrying the failing time.
    """
    if method not in INTEGRATORS:
        raise ValueError(f"method must be one of {INTEGRATORS}, got '{method}'")
    step = STEPPERS[method]

    state = sys.initial_state() if x0 is None else np.array(x0, dtype=float)
    if state.shape != (sys.dimension,):
        raise ValueError(f"x0 has {state.size} entries, system '{sys.name}' has {sys.dimension}")

    if recorder is None:
        labels = sys.labels or tuple(f"x{i}" for i in range(sys.dimension))
        recorder = Recorder(state_columns=tuple((label, i) for i, label in enumerate(labels)))

    n_steps = plan.n_steps
    stride = plan.record_stride
    n_records = n_steps // stride + 1
    indices = [index for _, index in recorder.state_columns]
    records = np.empty((n_records, len(indices)))
    records[0] = state[indices]

    logger.info(f" Simulating '{sys.name}' with {method}: {n_steps} steps, dt={plan.dt:g}, stride={stride}")
    started = time.perf_counter()
    report_every = max(1, n_steps // 100)
    dt = plan.dt
    t_start = plan.t_start

    row = 1
    for j in range(n_steps):
        state = step(sys, t_start + j * dt, state, dt)
        if (j + 1) % stride == 0:
            records[row] = state[indices]
            row += 1
        if progress is not None and (j + 1) % report_every == 0:
            progress(j + 1, n_steps)

    logger.info(f" Finished '{sys.name}' in {time.perf_counter() - started:.2f}s")

    times = t_start + np.arange(n_records) * (stride * dt)
    columns: Dict[str, np.ndarray] = {
        name: records[:, col] for col, (name, _) in enumerate(recorder.state_columns)
    }
    if recorder.truth is not None:
        for order in recorder.truth_orders:
            columns[f"true.d{order}"] = sample_signal(recorder.truth, times, order)
    return Trajectory(times=times, columns=columns, record_period=stride * dt)
