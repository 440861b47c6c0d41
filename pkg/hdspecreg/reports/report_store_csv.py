"""
CSV report store for hdspecreg.
"""

import logging
import threading
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from hdspecreg.common.exceptions import handle_exceptions
from hdspecreg.reports.report_store import ReportStore

logger = logging.getLogger(__name__)


class CsvReportStore(ReportStore):
    """
    One CSV file per report, written through pandas.

    Columns are the union of the record keys in first-seen order; a record
    without a key leaves the cell empty.

    Examples
    --------
    .. code-block:: python

        store = CsvReportStore(Path("results"))
        store.write_records("screen", report.to_records())
        rows = store.load_records("screen")
    """

    def __init__(self, directory: Path) -> None:
        super().__init__(directory)
        self._lock = threading.Lock()

    @property
    def suffix(self) -> str:
        return ".csv"

    def write_records(self, name: str, records: List[Dict[str, Any]]) -> Path:
        path = self.path_for(name)
        columns: Dict[str, None] = {}
        for record in records:
            columns.update(dict.fromkeys(record))
        frame = pd.DataFrame(records, columns=list(columns))
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            frame.to_csv(path, index=False, float_format="%.17g")
        logger.info("Wrote %d row(s) to %s", len(frame), path)
        return path

    @handle_exceptions(default_return_value=[])
    def load_records(self, name: str) -> List[Dict[str, Any]]:
        path = self.path_for(name)
        if not path.exists():
            return []
        with self._lock:
            frame = pd.read_csv(path)
        return frame.to_dict(orient="records")
