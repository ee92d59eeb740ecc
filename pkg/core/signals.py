"""
Analytic test signals with exact derivatives, derivative bounds and
measurement-noise injection.
"""

import logging
import math
from typing import Callable, Sequence, Union

import numpy as np

from .models import NoiseSpec, TestSignal

logger = logging.getLogger(__name__)

SignalSource = Union[TestSignal, Callable[[float], float]]

# n-th derivative of sin / cos is a signed sin / cos, cycling with period 4
_SINE_CYCLE = ((1.0, math.sin), (1.0, math.cos), (-1.0, math.sin), (-1.0, math.cos))
_COSINE_CYCLE = ((1.0, math.cos), (-1.0, math.sin), (-1.0, math.cos), (1.0, math.sin))
_NP_FUNCS = {math.sin: np.sin, math.cos: np.cos}


def _term_derivative(kind: str, order: int):
    cycle = _SINE_CYCLE if kind == "sine" else _COSINE_CYCLE
    return cycle[order % 4]


def eval_signal(sig: TestSignal, t: float, order: int = 0) -> float:
    """
    Evaluate the order-th time derivative of a sinusoid sum at time t.

    Each term A*sin(w t) differentiates to A*w^n times a rotated sinusoid,
    so the result is exact up to floating-point rounding.
    """
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    total = 0.0
    for term in sig.terms:
        sign, func = _term_derivative(term.kind, order)
        total += sign * term.amplitude * term.omega ** order * func(term.omega * t)
    return total


def sample_signal(sig: TestSignal, times: np.ndarray, order: int = 0) -> np.ndarray:
    """Vectorised eval_signal over an array of times."""
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    times = np.asarray(times, dtype=float)
    total = np.zeros_like(times)
    for term in sig.terms:
        sign, func = _term_derivative(term.kind, order)
        total += sign * term.amplitude * term.omega ** order * _NP_FUNCS[func](term.omega * times)
    return total


def derivative_bound(sig: TestSignal, order: int) -> float:
    """Triangle-inequality bound sum |A| w^order on sup_t |a^(order)(t)|."""
    if order < 1:
        raise ValueError("derivative_bound needs order >= 1")
    return float(sum(abs(term.amplitude) * term.omega ** order for term in sig.terms))


def noise_sequence(noise: NoiseSpec, n: int) -> np.ndarray:
    """
    Draw n noise samples.

    Uses numpy's PCG64 generator seeded with `noise.seed`; uniform samples
    come from Generator.uniform and Gaussian samples from Generator.normal
    (ziggurat method), so sequences are identical across platforms.
    """
    if noise.kind == "none" or noise.magnitude == 0.0:
        return np.zeros(n)
    rng = np.random.default_rng(noise.seed)
    if noise.kind == "uniform":
        return rng.uniform(-noise.magnitude, noise.magnitude, n)
    return rng.normal(0.0, noise.magnitude, n)


def sample_with_noise(sig: TestSignal, grid: Sequence[float], noise: NoiseSpec) -> np.ndarray:
    """Return a(t_j) + n_j over a strictly increasing time grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be strictly increasing")
    return sample_signal(sig, grid, 0) + noise_sequence(noise, grid.size)


def signal_source(sig: SignalSource) -> Callable[[float], float]:
    """Turn a TestSignal (or an arbitrary callable) into a fast t -> a(t) function."""
    if not isinstance(sig, TestSignal):
        if not callable(sig):
            raise TypeError("signal must be a TestSignal or a callable of t")
        return sig

    sines = tuple((term.amplitude, term.omega) for term in sig.terms if term.kind == "sine")
    cosines = tuple((term.amplitude, term.omega) for term in sig.terms if term.kind == "cosine")
    sin, cos = math.sin, math.cos

    def value(t: float) -> float:
        total = 0.0
        for amp, omega in sines:
            total += amp * sin(omega * t)
        for amp, omega in cosines:
            total += amp * cos(omega * t)
        return total

    return value


class HeldNoiseInput:
    """
    Measured input a(t) + n_j, where n_j is drawn once per integration step
    on the step grid and held until the next grid point.
    """

    def __init__(self, source: Callable[[float], float], noise: NoiseSpec,
                 t_start: float, dt: float, n_steps: int):
        self.source = source
        self.t_start = t_start
        self.dt = dt
        self.samples = noise_sequence(noise, n_steps + 1).tolist()
        self._last = len(self.samples) - 1
        logger.debug(f"Noise input: kind={noise.kind} magnitude={noise.magnitude} seed={noise.seed}")

    def __call__(self, t: float) -> float:
        idx = int(math.floor((t - self.t_start) / self.dt + 1e-9))
        idx = min(max(idx, 0), self._last)
        return self.source(t) + self.samples[idx]
