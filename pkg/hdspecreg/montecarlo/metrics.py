"""
Monte Carlo performance measures.
"""

from typing import Dict, Iterable, Mapping

import numpy as np
import pandas as pd

from hdspecreg.common.exceptions import DataError

MAD_CENTERS = ("median", "truth")
METRIC_COLUMNS = ("MEANB", "RMSE", "MEDB", "MAD")


def coefficient_metrics(estimates: Iterable[float], truth: float, mad_center: str = "median") -> Dict[str, float]:
    """
    Mean bias, root mean squared error, median bias and median absolute
    deviation of one coefficient across replications.

    Parameters
    ----------
    estimates : Iterable[float]
        One estimate per successful replication.
    truth : float
        True coefficient.
    mad_center : {"median", "truth"}, optional
        Centre of the absolute deviations: the median estimate (default) or
        the true value.

    Returns
    -------
    Dict[str, float]
        Keys ``MEANB``, ``RMSE``, ``MEDB``, ``MAD``.

    Examples
    --------
    .. code-block:: python

        coefficient_metrics([1.2], 1.0)  # MEANB 0.2, RMSE 0.2, MEDB 0.2, MAD 0.0
    """
    values = np.asarray(list(estimates), dtype=np.float64)
    if values.size == 0:
        raise DataError("no estimates to evaluate")
    if mad_center not in MAD_CENTERS:
        raise DataError(f"mad_center must be one of {MAD_CENTERS}, got '{mad_center}'")
    errors = values - truth
    center = np.median(values) if mad_center == "median" else truth
    return {
        "MEANB": float(np.mean(errors)),
        "RMSE": float(np.sqrt(np.mean(errors**2))),
        "MEDB": float(np.median(errors)),
        "MAD": float(np.median(np.abs(values - center))),
    }


def metrics_table(estimates: pd.DataFrame, truth: Mapping[str, float], mad_center: str = "median") -> pd.DataFrame:
    """
    :func:`coefficient_metrics` for every column of ``estimates`` that has a
    true value; one row per coefficient.
    """
    rows = {}
    for name in estimates.columns:
        if name in truth:
            column = estimates[name].dropna()
            if len(column):
                rows[name] = coefficient_metrics(column, truth[name], mad_center)
    return pd.DataFrame.from_dict(rows, orient="index", columns=list(METRIC_COLUMNS))
