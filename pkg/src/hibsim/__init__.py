"""System-level Monte Carlo simulator for a stratospheric-platform IMT
network overlaying a rural terrestrial deployment."""

from .config import ConfigError, ScenarioConfig, load_config, validate_band
from .engine import (
    run_coupling_loss,
    run_sinr_sweep,
    run_throughput_sweep,
)
from .mobility import run_mobility

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_config",
    "validate_band",
    "run_coupling_loss",
    "run_sinr_sweep",
    "run_throughput_sweep",
    "run_mobility",
    "__version__",
]
