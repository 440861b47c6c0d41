"""
SCAD-penalised least squares.

Minimises

    L(b) = (1 / 2n) ||y - X b||^2 + sum_j J_lambda(|b_j|)

by the local linear approximation: at the current iterate the concave penalty
is replaced by its tangent, a weighted lasso with weights
``J'_lambda(|b_j|)``, which is solved by cyclic coordinate descent. The outer
objective never increases.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from hdspecreg.common.exceptions import DataError, NumericalError, RankDeficiencyError
from hdspecreg.penalized.scad import ScadParams, exact_zeros, scad_deriv, scad_penalty, soft_threshold

logger = logging.getLogger(__name__)

OUTER_TOL = 1e-7
MAX_OUTER = 200
INNER_TOL = 1e-10
MAX_INNER = 10_000
MONOTONE_TOL = 1e-12


@dataclass(frozen=True)
class ScadFit:
    """
    Result of :func:`fit_scad_ls`.

    Attributes
    ----------
    beta : np.ndarray
        Coefficients with exact zeros below ``1e-10``.
    active : FrozenSet[int]
        ``{j : beta_j != 0}``.
    params : ScadParams
        Tuning pair used.
    iterations : int
        Outer (LLA) iterations performed.
    converged : bool
        Whether the change criterion was met within the budget.
    objective : float
        ``L(beta)``.
    objective_path : Tuple[float, ...]
        Objective after the start and after every outer iteration.
    unpenalized : Tuple[int, ...]
        Columns excluded from the penalty (e.g. an intercept).
    """

    beta: np.ndarray
    active: FrozenSet[int]
    params: ScadParams
    iterations: int
    converged: bool
    objective: float
    objective_path: Tuple[float, ...] = field(default=())
    unpenalized: Tuple[int, ...] = ()

    def report(self, names: Sequence[str] = ()) -> Dict[str, Any]:
        names = list(names) or [f"b{j}" for j in range(self.beta.shape[0])]
        return {
            "lambda": self.params.lam,
            "a": self.params.a,
            "iterations": self.iterations,
            "converged": self.converged,
            "objective": self.objective,
            "active": ",".join(names[j] for j in sorted(self.active)),
            "beta": {name: float(b) for name, b in zip(names, self.beta)},
        }


def _check_xy(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DataError(f"dimension mismatch: X has shape {X.shape}, y has length {y.shape[0]}")
    if X.shape[0] < 2:
        raise DataError(f"n < 2 (got {X.shape[0]})")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("non-finite value in X or y")
    return X, y


def _penalty_mask(p: int, unpenalized: Iterable[int]) -> np.ndarray:
    mask = np.ones(p, dtype=bool)
    for j in unpenalized:
        if not 0 <= j < p:
            raise DataError(f"unpenalized index {j} out of range [0, {p})")
        mask[j] = False
    return mask


def ls_objective(X: np.ndarray, y: np.ndarray, beta: np.ndarray, params: ScadParams, unpenalized: Iterable[int] = ()) -> float:
    """
    ``(1 / 2n) ||y - X b||^2`` plus the SCAD penalty on penalised coordinates.
    """
    X, y = _check_xy(X, y)
    mask = _penalty_mask(X.shape[1], unpenalized)
    resid = y - X @ beta
    return float(resid @ resid / (2.0 * X.shape[0]) + np.sum(scad_penalty(beta[mask], params)))


def initial_estimate(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    OLS when ``p < n / 2``, otherwise ridge with penalty
    ``1e-3 * trace(X'X / n) / p``.
    """
    n, p = X.shape
    if p < n / 2:
        return np.linalg.lstsq(X, y, rcond=None)[0]
    gram = X.T @ X / n
    ridge = 1e-3 * np.trace(gram) / p
    return np.linalg.solve(gram + ridge * np.eye(p), X.T @ y / n)


def _weighted_lasso_cd(
    X: np.ndarray, y: np.ndarray, beta: np.ndarray, weights: np.ndarray, col_sq: np.ndarray
) -> np.ndarray:
    n = X.shape[0]
    beta = beta.copy()
    resid = y - X @ beta
    for _ in range(MAX_INNER):
        max_change = 0.0
        for j in range(X.shape[1]):
            if col_sq[j] == 0.0:
                if beta[j] != 0.0:
                    beta[j] = 0.0
                continue
            old = beta[j]
            z = X[:, j] @ resid / n + col_sq[j] * old
            new = soft_threshold(z, weights[j]) / col_sq[j]
            if new != old:
                resid -= X[:, j] * (new - old)
                beta[j] = new
                max_change = max(max_change, abs(new - old))
        if max_change < INNER_TOL:
            break
    return beta


def fit_scad_ls(
    X: np.ndarray,
    y: np.ndarray,
    params: ScadParams,
    init: Optional[np.ndarray] = None,
    unpenalized: Iterable[int] = (),
) -> ScadFit:
    """
    SCAD-penalised least squares by local linear approximation.

    Parameters
    ----------
    X : np.ndarray
        ``n x p`` design; include a column of ones for an intercept.
    y : np.ndarray
        Length-n response.
    params : ScadParams
        Tuning pair.
    init : np.ndarray, optional
        Starting coefficients; by default :func:`initial_estimate`.
    unpenalized : Iterable[int], optional
        Columns left out of the penalty.

    Returns
    -------
    ScadFit
        Returned unconverged (``converged=False``) when the outer budget runs
        out.

    Raises
    ------
    DataError
        On dimension mismatch or a wrongly sized ``init``.
    NumericalError
        If the objective becomes non-finite.
    """
    X, y = _check_xy(X, y)
    n, p = X.shape
    unpenalized = tuple(sorted(set(int(j) for j in unpenalized)))
    mask = _penalty_mask(p, unpenalized)
    beta = initial_estimate(X, y) if init is None else np.array(init, dtype=np.float64).ravel()
    if beta.shape[0] != p:
        raise DataError(f"init has length {beta.shape[0]}, expected {p}")

    col_sq = np.einsum("ij,ij->j", X, X) / n
    objective = ls_objective(X, y, beta, params, unpenalized)
    path = [objective]
    converged = False
    iterations = 0
    for iterations in range(1, MAX_OUTER + 1):
        weights = np.where(mask, scad_deriv(np.abs(beta), params), 0.0)
        new_beta = _weighted_lasso_cd(X, y, beta, weights, col_sq)
        change = float(np.max(np.abs(new_beta - beta))) if p else 0.0
        beta = new_beta
        objective = ls_objective(X, y, beta, params, unpenalized)
        if not np.isfinite(objective):
            raise NumericalError(f"non-finite SCAD-LS objective at iteration {iterations}")
        if objective > path[-1] + MONOTONE_TOL * max(1.0, abs(path[-1])):
            logger.warning("SCAD-LS objective increased from %.12g to %.12g", path[-1], objective)
        path.append(objective)
        if change < OUTER_TOL:
            converged = True
            break

    if not converged:
        logger.warning("SCAD-LS did not converge in %d iterations (lambda=%.4g, a=%.2f)", MAX_OUTER, params.lam, params.a)

    beta = exact_zeros(beta)
    return ScadFit(
        beta=beta,
        active=frozenset(int(j) for j in np.flatnonzero(beta)),
        params=params,
        iterations=iterations,
        converged=converged,
        objective=ls_objective(X, y, beta, params, unpenalized),
        objective_path=tuple(path),
        unpenalized=unpenalized,
    )


def kkt_residuals(X: np.ndarray, y: np.ndarray, fit: ScadFit) -> np.ndarray:
    """
    Per-coordinate violations of the first-order conditions at ``fit.beta``.

    With ``s_j = x_j'(y - X b) / n``: for a penalised zero coefficient the
    residual is ``max(0, |s_j| - lambda)``; for a penalised non-zero one it is
    ``|s_j - sign(b_j) J'(|b_j|)|``; for an unpenalised one it is ``|s_j|``.
    """
    X, y = _check_xy(X, y)
    beta = fit.beta
    mask = _penalty_mask(X.shape[1], fit.unpenalized)
    score = X.T @ (y - X @ beta) / X.shape[0]
    deriv = scad_deriv(np.abs(beta), fit.params)
    return np.where(
        ~mask,
        np.abs(score),
        np.where(beta == 0.0, np.maximum(np.abs(score) - fit.params.lam, 0.0), np.abs(score - np.sign(beta) * deriv)),
    )


def oracle_fit(X: np.ndarray, y: np.ndarray, support: Iterable[int]) -> np.ndarray:
    """
    OLS on the ``support`` columns, zeros elsewhere.

    Raises
    ------
    DataError
        If ``support`` is empty or out of range.
    RankDeficiencyError
        If the support columns are collinear.
    """
    X, y = _check_xy(X, y)
    support = sorted(set(int(j) for j in support))
    if not support:
        raise DataError("oracle support must be non-empty")
    if support[0] < 0 or support[-1] >= X.shape[1]:
        raise DataError(f"support {support} out of range [0, {X.shape[1]})")
    sub = X[:, support]
    if np.linalg.matrix_rank(sub) < len(support):
        raise RankDeficiencyError(f"oracle design on columns {support} is rank deficient")
    beta = np.zeros(X.shape[1])
    beta[support] = np.linalg.lstsq(sub, y, rcond=None)[0]
    return beta
