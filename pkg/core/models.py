"""
Data models for SD Bench.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .exceptions import MissingColumnError


SIGNAL_KINDS = ("sine", "cosine")
NOISE_KINDS = ("none", "uniform", "gaussian")
SWITCH_KINDS = ("sgn", "sat", "tanh")
METHODS = ("sd-cascade", "hgo", "hosm")
INTEGRATORS = ("euler", "rk4")


# =============================================================================
# Signals
# =============================================================================

@dataclass(frozen=True)
class SignalTerm:
    """One sinusoid amplitude * sin|cos(omega * t)."""
    amplitude: float
    omega: float  # rad/s
    kind: str = "sine"

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"term kind must be one of {SIGNAL_KINDS}, got '{self.kind}'")
        if not math.isfinite(self.amplitude):
            raise ValueError("term amplitude must be finite")
        if not math.isfinite(self.omega) or self.omega < 0:
            raise ValueError("term omega must be finite and >= 0")


@dataclass(frozen=True)
class TestSignal:
    """Finite sum of sinusoids with closed-form derivatives of any order."""
    __test__ = False  # not a pytest class

    terms: Tuple[SignalTerm, ...]
    name: str = "signal"

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a test signal needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def benchmark(cls) -> "TestSignal":
        """a(t) = 2 sin t + 3 cos 3t."""
        return cls(
            terms=(SignalTerm(2.0, 1.0, "sine"), SignalTerm(3.0, 3.0, "cosine")),
            name="benchmark",
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Additive measurement noise; magnitude is half-width (uniform) or std-dev (gaussian)."""
    kind: str = "none"
    magnitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}, got '{self.kind}'")
        if not (self.magnitude >= 0 and math.isfinite(self.magnitude)):
            raise ValueError("noise magnitude must be finite and >= 0")
        if self.seed < 0:
            raise ValueError("noise seed must be unsigned")


# =============================================================================
# Simulation
# =============================================================================

@dataclass(frozen=True)
class SimPlan:
    """Fixed-step time grid and recording stride."""
    t_start: float
    t_end: float
    dt: float
    record_stride: int = 100

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must be greater than t_start")
        if self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        if (self.t_end - self.t_start) / self.dt < 1 - 1e-9:
            raise ValueError("plan must contain at least one step")

    @property
    def n_steps(self) -> int:
        # last grid point never passes t_end; the relative slack absorbs e.g. 2 / 1e-6 = 1999999.9999999998
        ratio = (self.t_end - self.t_start) / self.dt
        return max(1, int(math.floor(ratio * (1.0 + 1e-9))))

    @property
    def n_records(self) -> int:
        return self.n_steps // self.record_stride + 1

    @property
    def record_period(self) -> float:
        return self.dt * self.record_stride

    def time_at(self, step: int) -> float:
        return self.t_start + step * self.dt


@dataclass(frozen=True)
class OdeSystem:
    """Right-hand side x' = rhs(t, x) with labelled state entries."""
    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    name: str = "system"
    labels: Tuple[str, ...] = ()
    x0: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.labels and len(self.labels) != self.dimension:
            raise ValueError("one label per state entry is required")
        if self.x0 is not None and len(self.x0) != self.dimension:
            raise ValueError("x0 length must match dimension")

    def initial_state(self) -> np.ndarray:
        if self.x0 is None:
            return np.zeros(self.dimension)
        return np.array(self.x0, dtype=float)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise MissingColumnError(label) from None


@dataclass(frozen=True)
class Recorder:
    """Which state entries and true derivatives to record."""
    state_columns: Tuple[Tuple[str, int], ...] = ()
    truth: Optional[TestSignal] = None
    truth_orders: Tuple[int, ...] = ()

    @classmethod
    def for_labels(cls, system: OdeSystem, labels: Sequence[str],
                   truth: Optional[TestSignal] = None,
                   truth_orders: Sequence[int] = ()) -> "Recorder":
        columns = tuple((label, system.index_of(label)) for label in labels)
        return cls(state_columns=columns, truth=truth, truth_orders=tuple(truth_orders))


@dataclass
class Trajectory:
    """Uniformly sampled time series of true values and estimates."""
    times: np.ndarray
    columns: Dict[str, np.ndarray] = field(default_factory=dict)
    record_period: Optional[float] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for name, values in self.columns.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.times.shape:
                raise ValueError(f"column '{name}' has {values.size} samples, expected {self.times.size}")
            self.columns[name] = values

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self.columns)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise MissingColumnError(name) from None

    def window_mask(self, t_from: float, t_to: float) -> np.ndarray:
        # window edges that sit on the grid are inclusive despite rounding
        slack = 1e-9 * max(1.0, abs(t_from), abs(t_to))
        return (self.times >= t_from - slack) & (self.times <= t_to + slack)


# =============================================================================
# Differentiators
# =============================================================================

@dataclass(frozen=True)
class SwitchSpec:
    """Switching function: exact sgn, or a sat/tanh surrogate of width epsilon."""
    kind: str = "sat"
    epsilon: float = 1e-4

    def __post_init__(self):
        if self.kind not in SWITCH_KINDS:
            raise ValueError(f"switch kind must be one of {SWITCH_KINDS}, got '{self.kind}'")
        if self.kind != "sgn" and not self.epsilon > 0:
            raise ValueError("switch epsilon must be > 0")

    @classmethod
    def sgn(cls) -> "SwitchSpec":
        return cls("sgn", 0.0)

    @classmethod
    def sat(cls, epsilon: float = 1e-4) -> "SwitchSpec":
        return cls("sat", epsilon)

    @classmethod
    def tanh(cls, epsilon: float = 1e-4) -> "SwitchSpec":
        return cls("tanh", epsilon)

    @property
    def label(self) -> str:
        if self.kind == "sgn":
            return "sgn"
        return f"{self.kind}(eps={self.epsilon:g})"


@dataclass(frozen=True)
class SdParams:
    """Gains of one switching-differentiator stage."""
    k: float
    L: float
    switch: SwitchSpec = field(default_factory=SwitchSpec)

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be > 0")
        if not self.L > 0:
            raise ValueError("L must be > 0")


@dataclass(frozen=True)
class SdState:
    alpha: float = 0.0  # tracks the stage input
    sigma: float = 0.0  # estimates the stage input's derivative


@dataclass(frozen=True)
class CascadeState:
    """States of n series-connected SD stages; stage i is driven by sigma_{i-1}."""
    stages: Tuple[SdState, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a cascade needs at least one stage")
        object.__setattr__(self, "stages", tuple(self.stages))

    @classmethod
    def zeros(cls, n_stages: int) -> "CascadeState":
        return cls(tuple(SdState() for _ in range(n_stages)))

    def as_vector(self) -> np.ndarray:
        return np.array([v for s in self.stages for v in (s.alpha, s.sigma)], dtype=float)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "CascadeState":
        if len(x) % 2:
            raise ValueError("cascade vector length must be even")
        return cls(tuple(SdState(float(x[i]), float(x[i + 1])) for i in range(0, len(x), 2)))


# =============================================================================
# Baselines
# =============================================================================

BENCHMARK_HGO_GAINS = (47.5, 902.5, 8573.75, 40725.3125, 77378.09375)


@dataclass(frozen=True)
class HgoConfig:
    """5th-order high-gain observer gains c0..c4 and time scale epsilon."""
    c: Tuple[float, ...] = BENCHMARK_HGO_GAINS
    epsilon: float = 0.03

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if len(self.c) != 5:
            raise ValueError("HGO needs exactly 5 gains c0..c4")
        if not all(math.isfinite(v) for v in self.c):
            raise ValueError("HGO gains must be finite")
        if not self.epsilon > 0:
            raise ValueError("HGO epsilon must be > 0")


@dataclass(frozen=True)
class HosmConfig:
    """5th-order HOSM differentiator; the final stage switch is exact sgn unless overridden."""
    L: float = 3e7
    final_switch: SwitchSpec = field(default_factory=SwitchSpec.sgn)

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("HOSM L must be > 0")


@dataclass(frozen=True)
class ObserverState:
    """z0 estimates a, zi estimates a^(i)."""
    z: Tuple[float, ...] = (0.0, 0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        if len(self.z) != 5:
            raise ValueError("observer state has exactly 5 entries")


# =============================================================================
# Convergence analysis
# =============================================================================

@dataclass(frozen=True)
class ErrorMapParams:
    """Worst-case error dynamics parameters; rho = L_delta / k."""
    k: float
    L_delta: float
    rho: float = field(init=False)

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be > 0")
        if not self.L_delta > 0:
            raise ValueError("L_delta must be > 0")
        object.__setattr__(self, "rho", self.L_delta / self.k)

    @classmethod
    def from_rho(cls, k: float, rho: float) -> "ErrorMapParams":
        return cls(k=k, L_delta=rho * k)


@dataclass(frozen=True)
class CrossingRecord:
    """One interval between successive zeros of e_alpha."""
    e_sigma_in: float
    t_delta: float
    e_sigma_out: float
    r: float


@dataclass(frozen=True)
class MapIterate:
    sequence: Tuple[CrossingRecord, ...]

    @property
    def e_values(self) -> Tuple[float, ...]:
        """e_sigma at every crossing, starting with the initial value."""
        if not self.sequence:
            return ()
        return (self.sequence[0].e_sigma_in,) + tuple(rec.e_sigma_out for rec in self.sequence)


# =============================================================================
# Metrics and experiments
# =============================================================================

@dataclass(frozen=True)
class MetricReport:
    """Comparison metrics of one estimate column against its truth."""
    settling_time: Optional[float]
    peak_abs: float
    peak_time: float
    chattering_index: float
    rms_error: float
    steady_window: Tuple[float, float]
    chatter_window: Tuple[float, float]
    record_period: Optional[float] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description."""
    name: str
    signal: TestSignal
    method: str
    plan: SimPlan
    integrator: str = "rk4"
    sd_stages: Tuple[SdParams, ...] = ()
    hgo: Optional[HgoConfig] = None
    hosm: Optional[HosmConfig] = None
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    initial_state: Optional[Tuple[float, ...]] = None
    band_fraction: float = 0.02
    steady_window: Tuple[float, float] = (0.5, 2.0)
    chatter_window: Tuple[float, float] = (0.5, 2.0)
    output: str = "results"
    description: str = ""

    @property
    def n_orders(self) -> int:
        if self.method == "sd-cascade":
            return len(self.sd_stages)
        return 4
