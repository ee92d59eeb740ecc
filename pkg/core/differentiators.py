"""
Switching differentiator (SD) and its series connection.

One SD stage driven by an input u(t):

    e_alpha     = u - alpha
    alpha_dot   = k * e_alpha + sigma
    sigma_dot   = L * switch(e_alpha)

sigma estimates u'. Stage i of a cascade is driven by sigma_{i-1}, stage 1
by the measured signal, so sigma_i estimates the i-th derivative.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .models import CascadeState, OdeSystem, SdParams, SdState, SwitchSpec
from .signals import SignalSource, signal_source

logger = logging.getLogger(__name__)

StageParams = Union[SdParams, Sequence[SdParams]]
_CompiledStage = Tuple[float, float, Callable[[float], float]]


def _sgn(e: float) -> float:
    # sgn(0) = 0 keeps the right-hand side odd
    if e > 0:
        return 1.0
    if e < 0:
        return -1.0
    return 0.0


def make_switch(switch: SwitchSpec) -> Callable[[float], float]:
    """Return a scalar function implementing the given switch mode."""
    if switch.kind == "sgn":
        return _sgn
    inv_eps = 1.0 / switch.epsilon
    if switch.kind == "tanh":
        tanh = math.tanh
        return lambda e: tanh(e * inv_eps)

    def sat(e: float) -> float:
        v = e * inv_eps
        if v > 1.0:
            return 1.0
        if v < -1.0:
            return -1.0
        return v

    return sat


def switch_fn(e: float, switch: SwitchSpec) -> float:
    """sgn(e), clamp(e/eps, -1, 1) or tanh(e/eps); always odd with range [-1, 1]."""
    return make_switch(switch)(e)


def sd_rhs(state: SdState, input_value: float, p: SdParams) -> Tuple[float, float]:
    """Derivatives (alpha_dot, sigma_dot) of one SD stage."""
    e_alpha = input_value - state.alpha
    return p.k * e_alpha + state.sigma, p.L * switch_fn(e_alpha, p.switch)


def resolve_stages(p: StageParams, n_stages: int) -> Tuple[SdParams, ...]:
    """Expand shared parameters to one SdParams per stage."""
    if n_stages < 1:
        raise ValueError("n_stages must be >= 1")
    if isinstance(p, SdParams):
        return (p,) * n_stages
    stages = tuple(p)
    if len(stages) != n_stages:
        raise ValueError(f"got {len(stages)} per-stage parameter sets for {n_stages} stages")
    return stages


def _compile(stages: Sequence[SdParams]) -> Tuple[_CompiledStage, ...]:
    return tuple((s.k, s.L, make_switch(s.switch)) for s in stages)


def _cascade_derivatives(flat_state: Sequence[float], a_value: float,
                         compiled: Sequence[_CompiledStage]) -> List[float]:
    out = []
    u = a_value
    for i, (k, L, switch) in enumerate(compiled):
        alpha = flat_state[2 * i]
        sigma = flat_state[2 * i + 1]
        e_alpha = u - alpha
        out.append(k * e_alpha + sigma)
        out.append(L * switch(e_alpha))
        u = sigma
    return out


def cascade_rhs(state: CascadeState, a_value: float, p: StageParams) -> List[Tuple[float, float]]:
    """Per-stage (alpha_dot, sigma_dot) of a series SD connection."""
    stages = resolve_stages(p, len(state.stages))
    flat = [v for s in state.stages for v in (s.alpha, s.sigma)]
    derivs = _cascade_derivatives(flat, a_value, _compile(stages))
    return [(derivs[i], derivs[i + 1]) for i in range(0, len(derivs), 2)]


def sd_labels(n_stages: int, prefix: str = "sd") -> Tuple[str, ...]:
    return tuple(f"{prefix}.{name}{i}" for i in range(1, n_stages + 1) for name in ("alpha", "sigma"))


def estimate_columns(n_stages: int, prefix: str = "sd") -> Tuple[str, ...]:
    return tuple(f"{prefix}.sigma{i}" for i in range(1, n_stages + 1))


def build_sd_system(sig: SignalSource, p: StageParams, n_stages: int,
                    x0: Optional[Sequence[float]] = None) -> OdeSystem:
    """
    Simulable cascade of n_stages SDs driven by `sig`.

    The state vector is interleaved (alpha1, sigma1, alpha2, sigma2, ...);
    the initial state defaults to all zeros.
    """
    stages = resolve_stages(p, n_stages)
    compiled = _compile(stages)
    source = signal_source(sig)
    dimension = 2 * n_stages

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        return np.array(_cascade_derivatives(x.tolist(), source(t), compiled))

    switches = sorted({s.switch.label for s in stages})
    logger.debug(f"Built SD cascade: {n_stages} stages, switch={', '.join(switches)}")
    return OdeSystem(
        dimension=dimension,
        rhs=rhs,
        name=f"sd-cascade[{n_stages}]",
        labels=sd_labels(n_stages),
        x0=None if x0 is None else tuple(float(v) for v in x0),
    )
