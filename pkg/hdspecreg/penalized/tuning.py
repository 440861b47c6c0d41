"""
K-fold cross-validation of the SCAD tuning pair ``(lambda, a)``.
"""

import logging
import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from hdspecreg.common.exceptions import DataError, NumericalError, handle_exceptions
from hdspecreg.data import SeedSpec, make_folds
from hdspecreg.penalized.scad import ScadParams
from hdspecreg.penalized.scad_ls import ScadFit, _check_xy, fit_scad_ls, initial_estimate

logger = logging.getLogger(__name__)

DEFAULT_A_GRID: Tuple[float, ...] = (2.1, 3.0, 3.7)
DEFAULT_LAMBDA_RANGE: Tuple[float, float] = (0.01, 2.0)
DEFAULT_GRID_SIZE = 30


def log_spaced_grid(scale: float, size: int = DEFAULT_GRID_SIZE, lam_range: Sequence[float] = DEFAULT_LAMBDA_RANGE) -> np.ndarray:
    """
    ``size`` log-spaced values in ``[lo, hi] * scale``, increasing.
    """
    lo, hi = float(lam_range[0]), float(lam_range[1])
    if not (0 < lo <= hi) or size < 1:
        raise DataError(f"invalid lambda grid: range={lam_range}, size={size}")
    if not (np.isfinite(scale) and scale > 0):
        raise DataError(f"lambda grid scale must be positive, got {scale}")
    return np.geomspace(lo * scale, hi * scale, size)


def default_lambda_grid(
    X: np.ndarray, y: np.ndarray, size: int = DEFAULT_GRID_SIZE, lam_range: Sequence[float] = DEFAULT_LAMBDA_RANGE
) -> np.ndarray:
    """
    Grid scaled by ``sd(y) * sqrt(log p / n)``.
    """
    X, y = _check_xy(X, y)
    n, p = X.shape
    return log_spaced_grid(np.std(y, ddof=1) * math.sqrt(math.log(max(p, 2)) / n), size, lam_range)


def select_from_table(table: pd.DataFrame) -> ScadParams:
    """
    Smallest ``cv_error``; ties go to the larger lambda, then the smaller a.
    """
    valid = table[np.isfinite(table["cv_error"])]
    if valid.empty:
        raise NumericalError("fold failure: every grid cell failed")
    best = valid.sort_values(["cv_error", "lambda", "a"], ascending=[True, False, True], kind="mergesort").iloc[0]
    return ScadParams(float(best["lambda"]), float(best["a"]))


def _check_grids(lambda_grid: Iterable[float], a_grid: Iterable[float], k: int) -> Tuple[np.ndarray, np.ndarray]:
    lams = np.sort(np.asarray(list(lambda_grid), dtype=np.float64))[::-1]
    a_values = np.asarray(list(a_grid), dtype=np.float64)
    if lams.size == 0 or a_values.size == 0:
        raise DataError("tuning grids must be non-empty")
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    return lams, a_values


def cv_select_tuning(
    X: np.ndarray,
    y: np.ndarray,
    lambda_grid: Iterable[float],
    a_grid: Iterable[float] = DEFAULT_A_GRID,
    k: int = 10,
    seed: Optional[SeedSpec] = None,
    unpenalized: Iterable[int] = (),
) -> Tuple[ScadParams, pd.DataFrame]:
    """
    Choose ``(lambda, a)`` by K-fold held-out squared prediction error.

    Within each fold and ``a`` the lambda path is fitted from the largest
    value down, each fit warm-started at the previous one.

    Parameters
    ----------
    X, y : np.ndarray
        Design and response.
    lambda_grid : Iterable[float]
        Candidate lambdas.
    a_grid : Iterable[float], optional
        Candidate ``a`` values.
    k : int, optional
        Number of folds, by default 10.
    seed : SeedSpec, optional
        Stream for the fold split; ``SeedSpec(0)`` when None.
    unpenalized : Iterable[int], optional
        Columns excluded from the penalty.

    Returns
    -------
    Tuple[ScadParams, pd.DataFrame]
        The selected pair and a table with columns ``lambda``, ``a``,
        ``cv_error`` and ``failed_folds``.

    Raises
    ------
    DataError
        If a grid is empty or ``k`` is invalid.
    NumericalError
        If every grid cell failed ("fold failure").
    """
    X, y = _check_xy(X, y)
    lams, a_values = _check_grids(lambda_grid, a_grid, k)
    unpenalized = tuple(unpenalized)
    folds = make_folds(X.shape[0], k, seed or SeedSpec(0))

    sq_error = np.zeros((a_values.size, lams.size))
    failed = np.zeros((a_values.size, lams.size), dtype=int)

    @handle_exceptions(default_return_value=None, log_exception=False)
    def fit_cell(X_train: np.ndarray, y_train: np.ndarray, params: ScadParams, init: np.ndarray) -> ScadFit:
        return fit_scad_ls(X_train, y_train, params, init=init, unpenalized=unpenalized)

    for train, test in folds.splits():
        X_train, y_train = X[train], y[train]
        start = initial_estimate(X_train, y_train)
        for ia, a in enumerate(a_values):
            warm = start
            for il, lam in enumerate(lams):
                fit = fit_cell(X_train, y_train, ScadParams(lam, a), warm)
                if fit is None:
                    failed[ia, il] += 1
                    continue
                warm = fit.beta
                resid = y[test] - X[test] @ fit.beta
                sq_error[ia, il] += float(resid @ resid)

    rows = []
    for ia, a in enumerate(a_values):
        for il, lam in enumerate(lams):
            error = sq_error[ia, il] / X.shape[0] if failed[ia, il] == 0 else np.nan
            rows.append({"lambda": lam, "a": a, "cv_error": error, "failed_folds": int(failed[ia, il])})
    table = pd.DataFrame(rows)
    params = select_from_table(table)
    logger.debug("SCAD-LS cross-validation selected lambda=%.5g a=%.2f", params.lam, params.a)
    return params, table


def fit_scad_ls_cv(
    X: np.ndarray,
    y: np.ndarray,
    lambda_grid: Optional[Iterable[float]] = None,
    a_grid: Iterable[float] = DEFAULT_A_GRID,
    k: int = 10,
    seed: Optional[SeedSpec] = None,
    unpenalized: Iterable[int] = (),
) -> Tuple[ScadFit, pd.DataFrame]:
    """
    Cross-validate the tuning pair, then refit on the full sample.

    Returns
    -------
    Tuple[ScadFit, pd.DataFrame]
        The full-sample fit and the cross-validation table.
    """
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(X, y)
    unpenalized = tuple(unpenalized)
    params, table = cv_select_tuning(X, y, lambda_grid, a_grid, k, seed, unpenalized)
    return fit_scad_ls(X, y, params, unpenalized=unpenalized), table
