"""
Core SD Bench modules: signals, integration, differentiators, convergence
analysis, metrics and experiment orchestration.
"""

from .exceptions import (
    ConfigError, DomainError, EmptyWindowError, MissingColumnError,
    NoCrossingError, SdBenchError, SimulationDivergenceError,
)
from .models import (
    CascadeState, ErrorMapParams, ExperimentConfig, HgoConfig, HosmConfig,
    NoiseSpec, SdParams, SignalTerm, SimPlan, SwitchSpec, TestSignal, Trajectory,
)

__all__ = [
    'SdBenchError', 'ConfigError', 'SimulationDivergenceError', 'NoCrossingError',
    'DomainError', 'MissingColumnError', 'EmptyWindowError',
    'SignalTerm', 'TestSignal', 'NoiseSpec', 'SimPlan', 'Trajectory', 'SwitchSpec',
    'SdParams', 'CascadeState', 'HgoConfig', 'HosmConfig', 'ErrorMapParams', 'ExperimentConfig',
]
