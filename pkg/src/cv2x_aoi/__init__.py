"""Slot-based C-V2X Mode 4 sidelink simulator with Age-of-Information metrics."""

__version__ = "0.1.0"

from .config import (ConfigError, MessageType, ScenarioConfig,
                     ValidatedConfig, validate)
from .engine import run, run_sweep

__all__ = ["ConfigError", "MessageType", "ScenarioConfig", "ValidatedConfig",
           "validate", "run", "run_sweep", "__version__"]
