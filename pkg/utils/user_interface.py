"""
User interface utilities for SD Bench.
"""

import os
import sys
import time
from enum import Enum
from typing import Dict, List, Sequence


class MessageType(Enum):
    """Enumeration for different types of user messages."""
    SUCCESS = "success"
    WARNING = "warning"
    ERROR = "error"
    INFO = "info"
    HEADER = "header"


class UserMessenger:
    """Centralized messaging system for consistent user communication."""

    # ANSI color codes for terminal output
    COLORS = {
        'reset': '\033[0m',
        'bold': '\033[1m',
        'green': '\033[92m',
        'yellow': '\033[93m',
        'red': '\033[91m',
        'blue': '\033[94m',
        'cyan': '\033[96m',
        'magenta': '\033[95m',
        'gray': '\033[90m'
    }

    SYMBOLS = {
        MessageType.SUCCESS: "✅",
        MessageType.WARNING: "⚠️",
        MessageType.ERROR: "❌",
        MessageType.INFO: "ℹ️",
        MessageType.HEADER: "🎯"
    }

    COLOR_MAP = {
        MessageType.SUCCESS: 'green',
        MessageType.WARNING: 'yellow',
        MessageType.ERROR: 'red',
        MessageType.INFO: 'blue',
        MessageType.HEADER: 'magenta'
    }

    @classmethod
    def _colorize(cls, text: str, color: str, stream=None) -> str:
        """Apply color formatting to text if terminal supports it."""
        stream = stream or sys.stdout
        try:
            if os.getenv('NO_COLOR') or not os.isatty(stream.fileno()):
                return text
            return f"{cls.COLORS.get(color, '')}{text}{cls.COLORS['reset']}"
        except (AttributeError, OSError, ValueError):
            return text

    @classmethod
    def print_message(cls, message: str, msg_type: MessageType = MessageType.INFO,
                      prefix: str = "", bold: bool = False) -> None:
        """Print a formatted message; errors and warnings go to stderr."""
        symbol = cls.SYMBOLS.get(msg_type, "")
        stream = sys.stderr if msg_type in (MessageType.ERROR, MessageType.WARNING) else sys.stdout
        formatted_text = f"{symbol} {prefix}{message}" if symbol else f"{prefix}{message}"
        color = 'bold' if bold else cls.COLOR_MAP.get(msg_type, 'reset')
        print(cls._colorize(formatted_text, color, stream), file=stream)

    @classmethod
    def print_header(cls, title: str) -> None:
        cls.print_message(f"\n{title}", MessageType.HEADER, bold=True)

    @classmethod
    def print_success(cls, message: str) -> None:
        cls.print_message(message, MessageType.SUCCESS)

    @classmethod
    def print_warning(cls, message: str) -> None:
        cls.print_message(message, MessageType.WARNING)

    @classmethod
    def print_error(cls, message: str) -> None:
        cls.print_message(message, MessageType.ERROR)

    @classmethod
    def print_info(cls, message: str) -> None:
        cls.print_message(message, MessageType.INFO)

    @classmethod
    def print_table(cls, rows: List[Dict[str, object]], columns: Sequence[str]) -> None:
        """Print rows as an aligned plain-text table."""
        def cell(value) -> str:
            if value is None or value == "":
                return "-"
            if isinstance(value, float):
                return f"{value:.6g}"
            return str(value)

        cells = [[cell(row.get(col)) for col in columns] for row in rows]
        widths = [max([len(col)] + [len(r[i]) for r in cells]) for i, col in enumerate(columns)]
        print("  " + "  ".join(col.ljust(w) for col, w in zip(columns, widths)))
        print("  " + "  ".join("─" * w for w in widths))
        for r in cells:
            print("  " + "  ".join(v.ljust(w) for v, w in zip(r, widths)))


class ProgressBar:
    """Simple progress bar for long-running simulations."""

    def __init__(self, total: int, description: str = "Simulating", stream=None):
        """
        Initialize progress bar.

        Args:
            total: Total number of steps
            description: Description of the operation
            stream: Output stream (defaults to stderr so CSV-to-stdout stays clean)
        """
        self.total = total
        self.current = 0
        self.description = description
        self.start_time = time.time()
        self.bar_width = 40
        self.stream = stream or sys.stderr

    def update(self, current: int, total: int = None, status: str = ""):
        """
        Update progress bar display.

        Matches the simulate() progress callback signature (step, n_steps).
        """
        if total is not None:
            self.total = total
        self.current = current
        progress = min(current / self.total, 1.0) if self.total > 0 else 1.0

        filled_width = int(self.bar_width * progress)
        bar = '█' * filled_width + '░' * (self.bar_width - filled_width)
        percentage = int(progress * 100)
        elapsed = time.time() - self.start_time
        status_msg = f" {status}" if status else ""

        print(f"\r[{bar}] {percentage}% {self.description} ({elapsed:.1f}s){status_msg}",
              end='', flush=True, file=self.stream)

    __call__ = update

    def complete(self, final_message: str = "Complete!"):
        """Show completion status and move to next line."""
        bar = '█' * self.bar_width
        elapsed = time.time() - self.start_time
        print(f"\r[{bar}] 100% {final_message} ({elapsed:.1f}s)", file=self.stream)


# Create global instance for easy access
msg = UserMessenger()
