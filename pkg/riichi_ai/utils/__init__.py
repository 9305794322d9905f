"""Utility modules."""

from .logger import setup_logger
from .metrics import MetricsCollector, MetricsWriter, Timer
from .exceptions import (
    RiichiAIException,
    TileCountError,
    IllegalActionError,
    NoYakuError,
    CheckpointError,
)

__all__ = [
    'setup_logger',
    'MetricsCollector',
    'MetricsWriter',
    'Timer',
    'RiichiAIException',
    'TileCountError',
    'IllegalActionError',
    'NoYakuError',
    'CheckpointError',
]
