"""
Report Store Base Class for hdspecreg.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List

logger = logging.getLogger(__name__)


class ReportStore(ABC):
    """
    Abstract base class for a directory of named result reports.

    Subclasses must implement the following:
    - write_records(name, records)
    - load_records(name)

    Typical Usage
    -------------
    1. Flatten nested result dictionaries with ``flatten_record``.
    2. Call write_records() once per report; an existing report of the same
       name is replaced.
    3. Use load_records() to read a report back, e.g. in tests.
    """

    def __init__(self, directory: Path) -> None:
        self.directory = Path(directory)

    @property
    @abstractmethod
    def suffix(self) -> str:
        """File suffix including the dot."""

    def path_for(self, name: str) -> Path:
        return self.directory / f"{name}{self.suffix}"

    @abstractmethod
    def write_records(self, name: str, records: List[Dict[str, Any]]) -> Path:
        """
        Write a report, replacing any previous one with the same name.

        Parameters
        ----------
        name : str
            Report name without suffix, e.g. ``"screen"``.
        records : List[Dict[str, Any]]
            Flat records (scalar values only).

        Returns
        -------
        Path
            The written file.
        """
        pass

    @abstractmethod
    def load_records(self, name: str) -> List[Dict[str, Any]]:
        """
        Read a report back.

        Parameters
        ----------
        name : str
            Report name without suffix.

        Returns
        -------
        List[Dict[str, Any]]
            Records in file order; empty if the report does not exist.
        """
        pass
