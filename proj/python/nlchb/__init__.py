"""Nonlocal Cahn-Hilliard-Boussinesq solver."""

import json

from ._core import (
    ConfigError,
    Error,
    Kernel,
    Simulation,
    calibration_constant,
    calibration_residual,
    compute_cd,
    config_warnings,
    gamma_sweep,
    local_energy,
    normalize_config,
    resume,
    run,
)
from ._core import validate as _validate


def validate(config: str) -> dict:
    """Assumption report for a configuration text."""
    return json.loads(_validate(config))


__all__ = [
    "ConfigError",
    "Error",
    "Kernel",
    "Simulation",
    "calibration_constant",
    "calibration_residual",
    "compute_cd",
    "config_warnings",
    "gamma_sweep",
    "local_energy",
    "normalize_config",
    "resume",
    "run",
    "validate",
]
