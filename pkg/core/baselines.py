"""
Reference differentiators: 5th-order high-gain observer (HGO) and
5th-order high-order sliding-mode (HOSM) differentiator.
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .differentiators import make_switch
from .models import HgoConfig, HosmConfig, ObserverState, OdeSystem
from .signals import SignalSource, signal_source

logger = logging.getLogger(__name__)

HOSM_COEFFICIENTS = (8.0, 5.0, 3.0, 1.5, 1.1)
HOSM_EXPONENTS = (4.0 / 5.0, 3.0 / 4.0, 2.0 / 3.0, 1.0 / 2.0)

BaselineConfig = Union[HgoConfig, HosmConfig]


def signed_power(x: float, p: float) -> float:
    """|x|^p * sgn(x) for p in (0, 1]."""
    if not 0 < p <= 1:
        raise ValueError("signed_power exponent must lie in (0, 1]")
    if x == 0:
        return 0.0
    return math.copysign(abs(x) ** p, x)


def _hgo_gains(cfg: HgoConfig) -> Tuple[float, ...]:
    return tuple(c / cfg.epsilon ** (i + 1) for i, c in enumerate(cfg.c))


def _hgo_derivatives(z: Sequence[float], a_value: float, gains: Sequence[float]) -> list:
    e = a_value - z[0]
    return [z[1] + gains[0] * e,
            z[2] + gains[1] * e,
            z[3] + gains[2] * e,
            z[4] + gains[3] * e,
            gains[4] * e]


def hgo_rhs(state: ObserverState, a_value: float, cfg: HgoConfig) -> np.ndarray:
    """z_i' = z_{i+1} + (c_i / eps^(i+1)) (a - z0) for i < 4, z4' = (c4 / eps^5)(a - z0)."""
    return np.array(_hgo_derivatives(state.z, a_value, _hgo_gains(cfg)))


def _hosm_gains(cfg: HosmConfig) -> Tuple[float, ...]:
    # lambda_i * L^(1/(5-i)) for the four fractional stages, 1.1 * L for the last
    fractional = tuple(coef * cfg.L ** (1.0 / (5 - i)) for i, coef in enumerate(HOSM_COEFFICIENTS[:4]))
    return fractional + (HOSM_COEFFICIENTS[4] * cfg.L,)


def _hosm_derivatives(z: Sequence[float], a_value: float, gains: Sequence[float], final_switch) -> list:
    out = []
    target = a_value
    for i in range(4):
        v = -gains[i] * signed_power(z[i] - target, HOSM_EXPONENTS[i])
        out.append(v)
        target = v
    out.append(-gains[4] * final_switch(z[4] - target))
    return out


def hosm_rhs(state: ObserverState, a_value: float, cfg: HosmConfig) -> np.ndarray:
    """Recursive HOSM chain v0..v3 followed by the discontinuous final stage."""
    return np.array(_hosm_derivatives(state.z, a_value, _hosm_gains(cfg), make_switch(cfg.final_switch)))


def method_prefix(cfg: BaselineConfig) -> str:
    if isinstance(cfg, HgoConfig):
        return "hgo"
    if isinstance(cfg, HosmConfig):
        return "hosm"
    raise TypeError(f"unsupported baseline config {type(cfg).__name__}")


def observer_labels(prefix: str) -> Tuple[str, ...]:
    return tuple(f"{prefix}.z{i}" for i in range(5))


def estimate_columns(prefix: str) -> Tuple[str, ...]:
    return tuple(f"{prefix}.z{i}" for i in range(1, 5))


def build_baseline_system(sig: SignalSource, cfg: BaselineConfig,
                          x0: Optional[Sequence[float]] = None) -> OdeSystem:
    """5-state simulable HGO or HOSM observer driven by `sig`, zero initial state by default."""
    prefix = method_prefix(cfg)
    source = signal_source(sig)

    if prefix == "hgo":
        gains = _hgo_gains(cfg)

        def rhs(t: float, x: np.ndarray) -> np.ndarray:
            return np.array(_hgo_derivatives(x.tolist(), source(t), gains))

        name = f"hgo[eps={cfg.epsilon:g}]"
    else:
        gains = _hosm_gains(cfg)
        final_switch = make_switch(cfg.final_switch)

        def rhs(t: float, x: np.ndarray) -> np.ndarray:
            return np.array(_hosm_derivatives(x.tolist(), source(t), gains, final_switch))

        name = f"hosm[L={cfg.L:g}, final={cfg.final_switch.label}]"

    logger.debug(f"Built baseline system {name}")
    return OdeSystem(
        dimension=5,
        rhs=rhs,
        name=name,
        labels=observer_labels(prefix),
        x0=None if x0 is None else tuple(float(v) for v in x0),
    )
