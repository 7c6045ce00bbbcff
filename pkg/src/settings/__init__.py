"""
Configuration models for ball-harmonics alignment.
"""

from .loader import load_settings
from .settings_model import AppSettings, LoggingSettings, OptimizerConfig, PhantomSettings, WedgeSettings

__all__ = ["AppSettings", "LoggingSettings", "OptimizerConfig", "PhantomSettings", "WedgeSettings", "load_settings"]
