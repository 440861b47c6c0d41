"""Expose the shared ConfigLoader instance."""

import logging

from hdspecreg.config.config_loader import ConfigLoader, parse_key_value_text

logger = logging.getLogger(__name__)

config = ConfigLoader()
try:
    config.load_config()
except Exception as e:  # a broken default file must not make the package unimportable
    logger.error("Falling back to built-in defaults: %s", e)
    config.reset()

__all__ = ["ConfigLoader", "config", "parse_key_value_text"]
