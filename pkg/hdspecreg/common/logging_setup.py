"""
Module for setting up global logging configuration for hdspecreg.
"""

import logging
import logging.config
from pathlib import Path
from typing import Any, Dict, Optional

from hdspecreg.common.exceptions import ConfigError
from hdspecreg.config import config  # our singleton config instance

PACKAGE_LOGGER = "hdspecreg"

# Third-party loggers (numpy, scipy, pandas, concurrent.futures) stay at this level or above
THIRD_PARTY_FLOOR = logging.WARNING


def setup_global_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Configure global logging settings for the entire application using the
    singleton config instance.

    Parameters
    ----------
    level : str, optional
        Log level name ("DEBUG", "INFO", ...) of the ``hdspecreg`` loggers.
        Taken from ``logging.logging_level`` in the config when omitted.
    log_file : str, optional
        Path of an additional log file. Taken from ``logging.log_file`` when
        omitted; an empty string disables the file handler.

    Notes
    -----
    1. The ``hdspecreg`` logger, parent of every module logger created with
       ``logging.getLogger(__name__)``, gets the requested level.
    2. The root logger, and so every third-party library, never goes below
       WARNING, so a DEBUG run shows bandwidth restarts and solver progress
       without third-party chatter.
    3. ``RuntimeWarning``s raised by numpy and scipy are captured through the
       ``py.warnings`` logger and end up in the same handlers.
    4. A file handler is added when a log file is given; its directory is
       created on demand.

    Returns
    -------
    None
        No return value.
    """
    # Retrieve log level and log file path, flags first, then the configuration
    log_level = (level or config.get_log_level()).upper()
    log_file = log_file if log_file is not None else config.get_log_file()
    numeric_level = logging.getLevelName(log_level)
    if not isinstance(numeric_level, int):
        raise ConfigError(f"unknown logging level {log_level!r}")
    root_level = max(numeric_level, THIRD_PARTY_FLOOR)

    # Ensure the directory for the log file exists if a log file is specified
    if log_file:
        log_path = Path(log_file)
        if not log_path.parent.exists():
            log_path.parent.mkdir(parents=True, exist_ok=True)

    logging_config: Dict[str, Any] = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"default": {"format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"}},
        "handlers": {
            # Console handler on stderr; stdout carries command results
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "default",
                "level": log_level,
                "stream": "ext://sys.stderr",
            },
        },
        "loggers": {
            # Module loggers propagate to the root handlers
            PACKAGE_LOGGER: {"level": log_level},
            "py.warnings": {"level": "WARNING"},
        },
        "root": {
            "handlers": ["console"],
            "level": logging.getLevelName(root_level),
        },
    }

    # If a log file is specified, add a file handler to the configuration
    if log_file:
        logging_config["handlers"]["file"] = {
            "class": "logging.FileHandler",
            "formatter": "default",
            "filename": log_file,
            "level": log_level,
        }
        logging_config["root"]["handlers"].append("file")

    # Apply the logging configuration, then route warnings.warn through logging
    logging.config.dictConfig(logging_config)
    logging.captureWarnings(True)
