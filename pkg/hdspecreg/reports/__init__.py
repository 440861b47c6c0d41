"""
Report writing package for hdspecreg.
"""

from hdspecreg.reports.flatten import flatten_record
from hdspecreg.reports.report_service import ReportService
from hdspecreg.reports.report_store import ReportStore
from hdspecreg.reports.report_store_csv import CsvReportStore
from hdspecreg.reports.report_store_text import TextReportStore

__all__ = ["flatten_record", "ReportService", "ReportStore", "CsvReportStore", "TextReportStore"]
