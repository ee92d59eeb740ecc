"""
Utility modules for SD Bench.
"""

from .user_interface import UserMessenger, MessageType, ProgressBar
from .csv_handler import CSVProcessor
from .validators import InputValidator

__all__ = [
    'UserMessenger',
    'MessageType',
    'ProgressBar',
    'CSVProcessor',
    'InputValidator'
]
