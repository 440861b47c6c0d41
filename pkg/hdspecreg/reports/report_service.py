"""
Report Service for hdspecreg.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd

from hdspecreg.config import config
from hdspecreg.reports.flatten import flatten_record
from hdspecreg.reports.report_store_csv import CsvReportStore
from hdspecreg.reports.report_store_text import TextReportStore

logger = logging.getLogger(__name__)

Records = Union[pd.DataFrame, Sequence[Mapping[str, Any]]]


class ReportService:
    """
    Writes tables and plain-text reports to one output directory.

    The directory defaults to ``output.dir`` from the global configuration.

    Examples
    --------
    .. code-block:: python

        service = ReportService(Path("results"))
        service.save_table("mc_report", report.metric_records())
        service.save_text("mc_report", report.summary_record())
    """

    def __init__(self, output_dir: Optional[Path] = None) -> None:
        self.output_dir = Path(output_dir) if output_dir is not None else config.get_output_dir()
        self.csv = CsvReportStore(self.output_dir)
        self.text = TextReportStore(self.output_dir)

    def save_table(self, name: str, records: Records) -> Path:
        """
        Write records or a DataFrame as ``<output_dir>/<name>.csv``; nested
        records are flattened first.
        """
        if isinstance(records, pd.DataFrame):
            rows: List[Dict[str, Any]] = records.to_dict(orient="records")
        else:
            rows = [flatten_record(record) for record in records]
        return self.csv.write_records(name, rows)

    def save_text(self, name: str, *records: Mapping[str, Any]) -> Path:
        """
        Write one or more nested records as ``<output_dir>/<name>.txt``.
        """
        return self.text.write_records(name, [flatten_record(record) for record in records])
