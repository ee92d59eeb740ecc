"""
Input validation utilities for SD Bench.
"""

import math
import re
from typing import Any, List, Sequence, Tuple

import numpy as np

from core.exceptions import ConfigError


class InputValidator:
    """Field checks for configuration values and command-line grids."""

    @staticmethod
    def validate_number(value: Any, field: str) -> float:
        """Finite real number, bools rejected."""
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(field, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(field, "must be finite")
        return value

    @staticmethod
    def validate_positive(value: Any, field: str) -> float:
        value = InputValidator.validate_number(value, field)
        if value <= 0:
            raise ConfigError(field, f"must be > 0, got {value:g}")
        return value

    @staticmethod
    def validate_positive_int(value: Any, field: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(field, f"expected a positive integer, got {value!r}")
        return value

    @staticmethod
    def validate_window(value: Any, field: str) -> Tuple[float, float]:
        """Two-element [from, to] with from <= to."""
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(field, f"expected [from, to], got {value!r}")
        t_from = InputValidator.validate_number(value[0], f"{field}[0]")
        t_to = InputValidator.validate_number(value[1], f"{field}[1]")
        if t_to < t_from:
            raise ConfigError(field, f"end {t_to:g} precedes start {t_from:g}")
        return t_from, t_to

    @staticmethod
    def validate_choice(value: Any, choices: Sequence[str], field: str) -> str:
        if value not in choices:
            raise ConfigError(field, f"must be one of {', '.join(choices)}, got {value!r}")
        return value

    @staticmethod
    def parse_grid(text: str, field: str, positive: bool = False) -> List[float]:
        """
        Parse a grid argument.

        Accepted forms:
            "0.1,1,10"          explicit values
            "lin:a:b:n"         n linearly spaced values in [a, b]
            "log:a:b:n"         n log-spaced values in [a, b], a, b > 0
            "symlog:a:b:n"      log:a:b:n mirrored about zero (2n values, sorted)
        """
        text = (text or "").strip()
        if not text:
            raise ConfigError(field, "grid is empty")

        if ":" in text:
            kind, *parts = text.split(":")
            if kind not in ("lin", "log", "symlog") or len(parts) != 3:
                raise ConfigError(field, f"cannot parse grid '{text}'")
            try:
                start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            except ValueError:
                raise ConfigError(field, f"cannot parse grid '{text}'") from None
            if count < 1:
                raise ConfigError(field, "grid needs at least one point")
            if kind == "lin":
                values = np.linspace(start, stop, count).tolist()
            else:
                if not (start > 0 and stop > 0):
                    raise ConfigError(field, "log grid bounds must be > 0")
                values = np.geomspace(start, stop, count).tolist()
                if kind == "symlog":
                    values = sorted([-v for v in values] + values)
        else:
            try:
                values = [float(part) for part in text.split(",") if part.strip()]
            except ValueError:
                raise ConfigError(field, f"cannot parse grid '{text}'") from None

        if not values:
            raise ConfigError(field, "grid is empty")
        if not all(math.isfinite(v) for v in values):
            raise ConfigError(field, "grid values must be finite")
        if positive and any(v <= 0 for v in values):
            raise ConfigError(field, "grid values must be > 0")
        return values

    @staticmethod
    def sanitize_filename(filename: str) -> str:
        """Sanitize filename for safe file system usage."""
        return re.sub(r'[<>:"/\\|?*\s]', '_', filename)
