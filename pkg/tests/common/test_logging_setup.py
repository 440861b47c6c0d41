"""
Unit tests for setup_global_logging.
"""

import logging
import tempfile
import unittest
import warnings
from pathlib import Path

from hdspecreg.common.exceptions import ConfigError
from hdspecreg.common.logging_setup import PACKAGE_LOGGER, setup_global_logging


class TestSetupGlobalLogging(unittest.TestCase):
    """
    Test cases for the dictConfig-based logging setup.
    """

    def setUp(self) -> None:
        self.root = logging.getLogger()
        self.package = logging.getLogger(PACKAGE_LOGGER)
        self.saved_level = self.root.level
        self.saved_package_level = self.package.level
        self.saved_handlers = list(self.root.handlers)

    def tearDown(self) -> None:
        logging.captureWarnings(False)
        for handler in self.root.handlers:
            if handler not in self.saved_handlers:
                handler.close()
        self.root.handlers = self.saved_handlers
        self.root.setLevel(self.saved_level)
        self.package.setLevel(self.saved_package_level)

    def test_level_override(self) -> None:
        """
        The package logger follows the requested level; the root logger
        stays at WARNING for third-party libraries.
        """
        setup_global_logging("debug", log_file="")
        self.assertEqual(self.package.level, logging.DEBUG)
        self.assertEqual(self.root.level, logging.WARNING)
        self.assertTrue(logging.getLogger("hdspecreg.density.bandwidth").isEnabledFor(logging.DEBUG))
        self.assertFalse(logging.getLogger("scipy.optimize").isEnabledFor(logging.INFO))
        self.assertTrue(any(isinstance(h, logging.StreamHandler) for h in self.root.handlers))

    def test_quiet_level_applies_to_root_too(self) -> None:
        setup_global_logging("ERROR", log_file="")
        self.assertEqual(self.package.level, logging.ERROR)
        self.assertEqual(self.root.level, logging.ERROR)

    def test_unknown_level(self) -> None:
        with self.assertRaises(ConfigError):
            setup_global_logging("LOUD", log_file="")

    def test_file_handler_creates_parent_directory(self) -> None:
        """
        A log file in a missing directory gets its directory created, and
        captured warnings land in it next to package messages.
        """
        with tempfile.TemporaryDirectory() as tmp:
            log_path = Path(tmp) / "logs" / "run.log"
            setup_global_logging("INFO", log_file=str(log_path))
            logging.getLogger("hdspecreg.test").info("hello")
            with warnings.catch_warnings():
                warnings.simplefilter("always")
                warnings.warn("divide by zero encountered", RuntimeWarning)
            for handler in self.root.handlers:
                handler.flush()
                if isinstance(handler, logging.FileHandler):
                    handler.close()
            self.assertTrue(log_path.parent.exists())
            text = log_path.read_text()
            self.assertIn("hello", text)
            self.assertIn("py.warnings", text)
            self.root.handlers = []


if __name__ == "__main__":
    unittest.main()
