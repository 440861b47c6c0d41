"""
Plain-text ``key = value`` report store for hdspecreg.
"""

import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, List

from hdspecreg.common.exceptions import handle_exceptions
from hdspecreg.reports.report_store import ReportStore

logger = logging.getLogger(__name__)


def _format_value(value: Any) -> str:
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return json.dumps(list(value))
    return str(value)


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except ValueError:
        return text


class TextReportStore(ReportStore):
    """
    Human-readable reports: one aligned ``key = value`` line per field,
    records separated by a blank line.

    Floats are written with ``repr`` so they read back exactly; other values
    read back as JSON scalars when they parse, else as strings.

    Examples
    --------
    .. code-block:: python

        store = TextReportStore(Path("results"))
        store.write_records("fit", [flatten_record(fit.report(names))])
    """

    def __init__(self, directory: Path) -> None:
        super().__init__(directory)
        self._lock = threading.Lock()

    @property
    def suffix(self) -> str:
        return ".txt"

    def write_records(self, name: str, records: List[Dict[str, Any]]) -> Path:
        path = self.path_for(name)
        blocks = []
        for record in records:
            width = max((len(key) for key in record), default=0)
            blocks.append("\n".join(f"{key:<{width}} = {_format_value(value)}" for key, value in record.items()))
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n\n".join(blocks) + "\n", encoding="utf-8")
        logger.info("Wrote %d record(s) to %s", len(records), path)
        return path

    @handle_exceptions(default_return_value=[])
    def load_records(self, name: str) -> List[Dict[str, Any]]:
        path = self.path_for(name)
        if not path.exists():
            return []
        with self._lock:
            text = path.read_text(encoding="utf-8")
        records: List[Dict[str, Any]] = []
        current: Dict[str, Any] = {}
        for line in text.splitlines():
            if not line.strip():
                if current:
                    records.append(current)
                    current = {}
                continue
            key, _, value = line.partition("=")
            current[key.strip()] = _parse_value(value.strip())
        if current:
            records.append(current)
        return records
