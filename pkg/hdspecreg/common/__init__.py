"""
Common utilities for hdspecreg.

Notes
-----
This package centralizes exception classes, the exception-handling decorator
and the logging configuration shared by every other sub-package.
"""

from hdspecreg.common.exceptions import (
    ConfigError,
    DataError,
    DegenerateDensityError,
    HdSpecRegError,
    NumericalError,
    OptimizerError,
    RankDeficiencyError,
    SeparationError,
    UsageError,
    exit_code_for,
    handle_exceptions,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateDensityError",
    "HdSpecRegError",
    "NumericalError",
    "OptimizerError",
    "RankDeficiencyError",
    "SeparationError",
    "UsageError",
    "exit_code_for",
    "handle_exceptions",
]
