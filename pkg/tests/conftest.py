"""
Configuration file for pytest.

This file is automatically loaded by pytest and helps with test configuration.
It adds the project root directory to the Python path, allowing imports from the hdspecreg directory,
and registers the ``--runslow`` option for the Monte Carlo acceptance runs.
"""

from pathlib import Path
import sys

import pytest

# Add the project root directory to the Python path (one level above tests)
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
