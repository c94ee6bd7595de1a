"""Modal-centric field inversion for Burgers flows."""

from ._core import (
    Config,
    ConfigError,
    Error,
    NumericError,
    Problem,
    __version__,
    config_hash,
    initial_condition,
    parse_key_values,
    run,
    simulate,
)

__all__ = [
    "Config",
    "ConfigError",
    "Error",
    "NumericError",
    "Problem",
    "__version__",
    "config_hash",
    "initial_condition",
    "parse_key_values",
    "run",
    "simulate",
]
