"""Python access to the aralab simulation core."""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    Error,
    ParseError,
    ValidationError,
    delay_experiment,
    fountain_roundtrip,
    fsoc_rx_power,
    orthogonality,
    power_model,
    ran_capacity,
    spectrum_scan,
    stream_session,
    xhaul_link,
)

__version__ = _core.__version__


def run_scenario(path, output_root=None):
    """Run a scenario config file. Returns (output_dir, files, summary dict)."""
    out_dir, files, summary = _core.run_scenario(path, output_root or "")
    return out_dir, files, _json.loads(summary)


def validate_scenario(path):
    _core.validate_scenario(path)


__all__ = [
    "ConfigError",
    "Error",
    "ParseError",
    "ValidationError",
    "delay_experiment",
    "fountain_roundtrip",
    "fsoc_rx_power",
    "orthogonality",
    "power_model",
    "ran_capacity",
    "run_scenario",
    "spectrum_scan",
    "stream_session",
    "validate_scenario",
    "xhaul_link",
]
