"""
Error types for SD Bench.
"""

from typing import Optional


class SdBenchError(Exception):
    """Base class for all errors raised by SD Bench."""


class ConfigError(SdBenchError, ValueError):
    """Invalid experiment configuration; `field` names the offending key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SimulationDivergenceError(SdBenchError, ArithmeticError):
    """A step produced non-finite values."""

    def __init__(self, t: float, detail: Optional[str] = None):
        self.t = t
        text = f"divergence at t={t!r}"
        if detail:
            text = f"{text} ({detail})"
        super().__init__(text)


class NoCrossingError(SdBenchError, RuntimeError):
    """The oracle did not find a zero of e_alpha within its horizon."""

    def __init__(self, horizon: float):
        self.horizon = horizon
        super().__init__(f"no crossing within horizon {horizon!r} s")


class DomainError(SdBenchError, ValueError):
    """Argument outside the domain an evaluation supports."""


class MissingColumnError(SdBenchError, KeyError):
    """Requested trajectory column does not exist."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"missing column '{column}'")

    def __str__(self) -> str:
        return self.args[0]


class EmptyWindowError(SdBenchError, ValueError):
    """Metric window selects no recorded samples."""
