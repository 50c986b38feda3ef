from .errors import (
    FarError,
    InputError,
    ParseError,
    NonStationaryError,
    NumericalFailure,
    UndefinedMetricError,
    StorageError,
)
from .config_manager import ConfigManager, get_system_config

__all__ = [
    "FarError",
    "InputError",
    "ParseError",
    "NonStationaryError",
    "NumericalFailure",
    "UndefinedMetricError",
    "StorageError",
    "ConfigManager",
    "get_system_config",
]
