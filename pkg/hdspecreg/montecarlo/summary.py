"""
Table layouts for Monte Carlo reports.

Every design has three layouts: ``A`` for the special-regressor estimator
(MEANB, RMSE, MEDB, MAD of the reported coefficients), ``B`` for the
selection outcomes and ``C`` for the Probit ratios (designs 1-3 only).
"""

import logging
import re
from typing import Dict, List, Tuple

import pandas as pd

from hdspecreg.common.exceptions import DataError
from hdspecreg.montecarlo.metrics import METRIC_COLUMNS
from hdspecreg.montecarlo.replications import ORACLE, PROBIT, SCAD_GMM, SCAD_LS, McReport

logger = logging.getLogger(__name__)

# reported coefficients per family of designs
VARIABLE_SELECTION_COEFS = ("x2", "x3")
MOMENT_SELECTION_COEFS = ("const", "x")

VARIABLE_SELECTION_COLUMNS: Tuple[Tuple[str, str], ...] = (
    ("screen_x1", "Pr(x1 screened)"),
    ("screen_x2", "Pr(x2 screened)"),
    ("beta1_zero", "Pr(b1 = 0)"),
    ("l0_norm", "E|b|_0"),
)
MOMENT_SELECTION_COLUMNS: Tuple[Tuple[str, str], ...] = (
    ("screen_relevant", "Pr(z_star, z1 screened)"),
    ("invalid_all_detected", "Pr(no invalid IV kept)"),
    ("valid_selected", "E|valid IVs kept|"),
)

_LAYOUT = re.compile(r"^([1-6])?([ABC])$")


def _parse_layout(report: McReport, layout: str) -> str:
    match = _LAYOUT.match(layout.strip().upper())
    if not match:
        raise DataError(f"unknown table layout '{layout}'; use A, B or C, optionally prefixed by the design id")
    design, letter = match.groups()
    if design is not None and int(design) != report.spec.design:
        raise DataError(f"layout {layout} refers to design {design}, report is for design {report.spec.design}")
    if letter == "C" and report.spec.is_moment_selection:
        raise DataError("layout C (Probit) exists for designs 1-3 only")
    return letter


def _estimator_rows(report: McReport, estimator: str, coefs: Tuple[str, ...]) -> List[Dict[str, object]]:
    table = report.metrics.get(estimator)
    if table is None:
        return []
    return [
        {"n": report.spec.n, "p_n": report.spec.p_n, "estimator": estimator, "coefficient": coef, **table.loc[coef].to_dict()}
        for coef in coefs
        if coef in table.index
    ]


def summarize(report: McReport, layout: str) -> pd.DataFrame:
    """
    Arrange a report as one of the table layouts.

    Parameters
    ----------
    report : McReport
        Completed Monte Carlo report.
    layout : str
        ``"A"``, ``"B"`` or ``"C"``, optionally with the design id in front
        (``"1A"``, ``"4B"``).

    Returns
    -------
    pd.DataFrame
        Layout A and C: one row per coefficient with MEANB, RMSE, MEDB, MAD
        (oracle rows follow when the oracle was run). Layout B: one row with
        the selection columns.

    Raises
    ------
    DataError
        "nothing to summarize" when the report holds no result for the
        layout, or for an unknown layout.
    """
    if not report.estimators:
        raise DataError("nothing to summarize: the report ran no estimator")
    letter = _parse_layout(report, layout)
    moment = report.spec.is_moment_selection

    if letter == "B":
        columns = MOMENT_SELECTION_COLUMNS if moment else VARIABLE_SELECTION_COLUMNS
        row: Dict[str, object] = {"n": report.spec.n, "p_n": report.spec.p_n}
        found = False
        for key, label in columns:
            row[label] = report.selection.get(key, float("nan"))
            found = found or key in report.selection
        if not found:
            raise DataError("nothing to summarize: no selection outcomes in the report")
        return pd.DataFrame([row])

    coefs = MOMENT_SELECTION_COEFS if moment else VARIABLE_SELECTION_COEFS
    if letter == "C":
        rows = _estimator_rows(report, PROBIT, coefs)
    else:
        rows = _estimator_rows(report, SCAD_GMM if moment else SCAD_LS, coefs) + _estimator_rows(report, ORACLE, coefs)
    if not rows:
        raise DataError(f"nothing to summarize: layout {letter} needs estimates the report does not hold")
    return pd.DataFrame(rows, columns=["n", "p_n", "estimator", "coefficient", *METRIC_COLUMNS])


def format_table(frame: pd.DataFrame) -> str:
    """
    Fixed-width text rendering with three decimals, as the tables are
    printed.
    """
    return frame.to_string(index=False, float_format=lambda value: f"{value:.3f}")


def summarize_all(report: McReport) -> Dict[str, pd.DataFrame]:
    """
    Every layout the report can fill, keyed ``"<design><letter>"``.
    """
    tables = {}
    for letter in "ABC":
        try:
            tables[f"{report.spec.design}{letter}"] = summarize(report, letter)
        except DataError as e:
            logger.debug("Skipping layout %s: %s", letter, e)
    if not tables:
        raise DataError("nothing to summarize")
    return tables
