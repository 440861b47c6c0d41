"""
Sample containers, CSV ingestion, fold splitting and random streams.
"""

from hdspecreg.data.data_table import DataTable, Role, load_csv
from hdspecreg.data.folds import FoldAssignment, make_folds
from hdspecreg.data.random_streams import SeedSpec

__all__ = ["DataTable", "Role", "load_csv", "FoldAssignment", "make_folds", "SeedSpec"]
