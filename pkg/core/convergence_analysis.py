"""
Convergence analysis of the switching differentiator.

Under the worst-case drive r = -L_delta * sgn(e_alpha) the tracking errors obey

    e_alpha'  = -k e_alpha + e_sigma
    e_sigma'  = -L_delta sgn(e_alpha)

Between two successive zeros of e_alpha the drive is constant, which gives a
closed-form return map e_sigma^i -> e_sigma^{i+1} in terms of the principal
Lambert-W branch. This module evaluates that map, its crossing intervals and
slope, and checks them against brute-force integration of the error dynamics.
"""

import logging
import math
from typing import Tuple

import numpy as np

from .exceptions import DomainError, NoCrossingError
from .models import CrossingRecord, ErrorMapParams, MapIterate, Trajectory

logger = logging.getLogger(__name__)

INV_E = math.exp(-1.0)

# Halley iteration stops at this residual or after this many iterations
_LAMBERT_TOL = 1e-15
_LAMBERT_MAX_ITER = 50
# below this |e|/rho the map is evaluated in a cancellation-free form
_POLISH_BELOW = 1.0
_SERIES_BELOW = 1e-2


def _sgn(x: float) -> float:
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


def lambert_w0(y: float) -> float:
    """
    Principal branch W0(y) for y in [-1/e, 0].

    Halley's method, seeded with the branch-point expansion
    w = -1 + p - p^2/3 (p = sqrt(2(1 + e*y))) near -1/e and with w = y near 0.
    """
    if y != y or y > 0 or y < -INV_E * (1.0 + 4e-16):
        raise DomainError(f"lambert_w0 is defined here only on [-1/e, 0], got {y!r}")
    if y == 0:
        return 0.0
    if y <= -INV_E:
        return -1.0

    if y < -0.25:
        p = math.sqrt(max(0.0, 2.0 * (1.0 + math.e * y)))
        w = -1.0 + p - p * p / 3.0
    else:
        w = y

    for _ in range(_LAMBERT_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - y
        if abs(f) <= _LAMBERT_TOL:
            break
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w = min(0.0, max(-1.0, w - dw))
        if abs(dw) <= 1e-17 * (1.0 + abs(w)):
            break
    return w


def map_x(e_sigma: float, rho: float) -> float:
    """x = -|e_sigma| / rho - 1, always <= -1."""
    if not rho > 0:
        raise ValueError("rho must be > 0")
    return -abs(e_sigma) / rho - 1.0


def _log1m_gap(v: float) -> float:
    """v + log(1 - v), summed as -sum v^n / n for small |v| to avoid cancellation."""
    if abs(v) >= 0.05:
        return v + math.log1p(-v)
    total = 0.0
    power = v * v
    for n in range(2, 60):
        term = power / n
        total -= term
        if abs(term) <= 1e-18 * abs(total):
            break
        power *= v
    return total


def _branch_gap(delta: float) -> float:
    """
    u = 1 + W(x e^x) for x = -1 - delta, delta >= 0.

    For small delta, x e^x sits on top of the branch point and W loses
    about half its digits, so u is polished with Newton's method on the
    equivalent equation u + log(1 - u) = log(1 + delta) - delta.
    """
    if delta == 0:
        return 0.0
    if delta < _SERIES_BELOW:
        u = delta - 2.0 * delta * delta / 3.0
    else:
        x = -1.0 - delta
        # x e^x underflows to -0 for very negative x, where W = 0
        y = max(x * math.exp(x), -INV_E)
        u = 1.0 + lambert_w0(y)
        if delta >= _POLISH_BELOW:
            return u

    target = _log1m_gap(-delta)
    for _ in range(30):
        g = _log1m_gap(u) - target
        dg = -u / (1.0 - u)
        if dg == 0.0:
            break
        step = g / dg
        u -= step
        if abs(step) <= 4e-16 * u:
            break
    return u


def crossing_interval(e_sigma: float, p: ErrorMapParams) -> float:
    """t_delta = -e_sigma / r + (1 + W(x e^x)) / k with r = -L_delta sgn(e_sigma)."""
    if e_sigma == 0:
        return 0.0
    r = -p.L_delta * _sgn(e_sigma)
    return -e_sigma / r + _branch_gap(abs(e_sigma) / p.rho) / p.k


def next_crossing_error(e_sigma: float, p: ErrorMapParams) -> float:
    """Return map e_sigma^{i+1} = -sgn(e_sigma^i) * rho * (1 + W(x e^x))."""
    if e_sigma == 0:
        return 0.0
    return -_sgn(e_sigma) * p.rho * _branch_gap(abs(e_sigma) / p.rho)


def map_slope_at_origin(p: ErrorMapParams) -> float:
    """Central-difference slope of the return map at the origin."""
    h = 1e-6 * p.rho
    return (next_crossing_error(h, p) - next_crossing_error(-h, p)) / (2.0 * h)


def crossing_record(e_sigma: float, p: ErrorMapParams) -> CrossingRecord:
    return CrossingRecord(
        e_sigma_in=e_sigma,
        t_delta=crossing_interval(e_sigma, p),
        e_sigma_out=next_crossing_error(e_sigma, p),
        r=-p.L_delta * _sgn(e_sigma),
    )


def iterate_map(e0: float, p: ErrorMapParams, n: int) -> MapIterate:
    """n successive applications of the return map starting from e0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    records = []
    e = e0
    for _ in range(n):
        record = crossing_record(e, p)
        records.append(record)
        e = record.e_sigma_out
    return MapIterate(tuple(records))


def transient_solution(e_d0: float, p: ErrorMapParams, t: float, sign_branch: int) -> float:
    """
    e_alpha^d(t) = (e_d0 + s rho) e^{-kt} - s rho before the first crossing,
    where s = sign_branch is the sign of e_alpha and r = -s L_delta.
    """
    if sign_branch not in (1, -1):
        raise ValueError("sign_branch must be +1 or -1")
    if t < 0:
        raise ValueError("t must be >= 0")
    s_rho = sign_branch * p.rho
    return (e_d0 + s_rho) * math.exp(-p.k * t) - s_rho


def interval_solution(e_sigma_i, p: ErrorMapParams, tau):
    """
    (e_alpha^d, e_sigma, e_alpha) at time tau after a crossing with e_sigma = e_sigma_i.

    Accepts scalar or array tau (and matching e_sigma_i).
    """
    e_sigma_i = np.asarray(e_sigma_i, dtype=float)
    tau = np.asarray(tau, dtype=float)
    r = -p.L_delta * np.sign(e_sigma_i)
    decay = np.exp(-p.k * tau)
    e_d = e_sigma_i * decay + (r / p.k) * (1.0 - decay)
    e_sigma = e_sigma_i + r * tau
    e_alpha = (e_sigma - e_d) / p.k
    return e_d, e_sigma, e_alpha


def crossing_profile(e0: float, p: ErrorMapParams, n_crossings: int, n_samples: int = 2001) -> Trajectory:
    """Closed-form e_sigma, e_alpha^d and e_alpha over n_crossings intervals, uniformly sampled."""
    iterate = iterate_map(e0, p, n_crossings)
    durations = np.array([rec.t_delta for rec in iterate.sequence])
    starts = np.concatenate(([0.0], np.cumsum(durations)))
    total = float(starts[-1])
    if total <= 0:
        times = np.zeros(1)
        zeros = np.zeros(1)
        return Trajectory(times=times, columns={"e_sigma": zeros, "e_alpha_d": zeros, "e_alpha": zeros})

    times = np.linspace(0.0, total, n_samples)
    which = np.clip(np.searchsorted(starts, times, side="right") - 1, 0, n_crossings - 1)
    e_in = np.array([rec.e_sigma_in for rec in iterate.sequence])[which]
    e_d, e_sigma, e_alpha = interval_solution(e_in, p, times - starts[which])
    return Trajectory(
        times=times,
        columns={"e_sigma": e_sigma, "e_alpha_d": e_d, "e_alpha": e_alpha},
        record_period=total / (n_samples - 1),
    )


# =============================================================================
# Brute-force oracle
# =============================================================================

def _rk4_error_step(ea: float, es: float, drive: float, k: float, h: float) -> Tuple[float, float]:
    # e_sigma' = drive is constant on the interval, so only e_alpha needs the stages
    k1 = -k * ea + es
    es_half = es + 0.5 * h * drive
    k2 = -k * (ea + 0.5 * h * k1) + es_half
    k3 = -k * (ea + 0.5 * h * k2) + es_half
    k4 = -k * (ea + h * k3) + es + h * drive
    return ea + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4), es + h * drive


def default_oracle_dt(e_sigma0: float, p: ErrorMapParams, resolution: float = 1e-4) -> float:
    """Step giving about 1/resolution steps per crossing and k*dt <= 1e-2."""
    return min(resolution * (abs(e_sigma0) / p.L_delta + 1.0 / p.k), 1e-2 / p.k)


def oracle_crossing(e_alpha0: float, e_sigma0: float, p: ErrorMapParams, dt: float) -> CrossingRecord:
    """
    Integrate the worst-case error dynamics with RK4 up to the next zero of e_alpha.

    sgn(e_alpha) is taken on the open interval after the start, where it is
    constant; at e_alpha = 0 that is the sign e_alpha leaves zero with,
    sgn(e_sigma). The zero is bracketed by consecutive steps and refined by
    bisection on the last step's length down to machine resolution.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    branch = _sgn(e_alpha0) or _sgn(e_sigma0)
    if branch == 0:
        return CrossingRecord(e_sigma_in=e_sigma0, t_delta=0.0, e_sigma_out=0.0, r=0.0)

    k = p.k
    drive = -p.L_delta * branch
    horizon = 10.0 * (abs(e_sigma0) / p.L_delta + 1.0 / k)
    n_max = int(math.ceil(horizon / dt))

    ea, es = e_alpha0, e_sigma0
    for j in range(n_max):
        ea_next, es_next = _rk4_error_step(ea, es, drive, k, dt)
        if branch * ea_next > 0:
            ea, es = ea_next, es_next
            continue

        lo, hi = 0.0, dt
        ea_cross, es_cross, h = ea_next, es_next, dt
        for _ in range(200):
            h = 0.5 * (lo + hi)
            ea_cross, es_cross = _rk4_error_step(ea, es, drive, k, h)
            if ea_cross == 0.0:
                break
            if branch * ea_cross > 0:
                lo = h
            else:
                hi = h
            if hi - lo <= 2.2e-16 * (j * dt + hi):
                break
        t_cross = j * dt + h
        logger.debug(f"Oracle crossing: e_sigma0={e_sigma0:g} t_delta={t_cross:.12g} "
                     f"e_sigma_out={es_cross:.12g} |e_alpha|={abs(ea_cross):.2e}")
        return CrossingRecord(e_sigma_in=e_sigma0, t_delta=t_cross, e_sigma_out=es_cross, r=drive)

    raise NoCrossingError(horizon)
