"""
Probit baseline fitted by Newton-Raphson.

The Probit index is ``gamma V + b0 + b'X`` with the error variance normalised
to one, so coefficients are compared with the special-regressor estimates
through the ratios ``b_l / gamma``.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.stats import norm

from hdspecreg.common.exceptions import DataError, RankDeficiencyError, SeparationError
from hdspecreg.data import DataTable, Role

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-8
MAX_ITER = 100
MAX_HALVINGS = 30
# an index coefficient this large means the likelihood has no finite maximiser
DIVERGENCE_BOUND = 1e6


@dataclass(frozen=True)
class ProbitFit:
    """
    Result of :func:`probit_fit`.

    Attributes
    ----------
    gamma : float
        Coefficient on the special regressor.
    coefficients : Dict[str, float]
        Intercept (``const``) and regressor coefficients.
    ratios : Dict[str, float]
        ``coefficient / gamma`` per regressor.
    loglik : float
        Maximised log-likelihood.
    iterations : int
        Newton iterations.
    converged : bool
        Whether the gradient criterion was met.
    """

    gamma: float
    coefficients: Dict[str, float]
    ratios: Dict[str, float]
    loglik: float
    iterations: int
    converged: bool

    def report(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "loglik": self.loglik,
            "iterations": self.iterations,
            "converged": self.converged,
            "coefficient": dict(self.coefficients),
            "ratio": dict(self.ratios),
        }


def _loglik_parts(theta: np.ndarray, q: np.ndarray, design: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    index = design @ theta
    qi = q * index
    log_cdf = norm.logcdf(qi)
    mills = q * np.exp(norm.logpdf(qi) - log_cdf)
    gradient = design.T @ mills
    hessian = -(design * (mills * (mills + index))[:, None]).T @ design
    return float(log_cdf.sum()), gradient, hessian


def check_separation(design: np.ndarray, y: np.ndarray) -> None:
    """
    Raise :class:`SeparationError` when some index separates the outcomes
    completely, ``(2y - 1) x'w >= 1`` for every observation.
    """
    q = 2.0 * y - 1.0
    result = linprog(
        c=np.zeros(design.shape[1]),
        A_ub=-(q[:, None] * design),
        b_ub=-np.ones(design.shape[0]),
        bounds=[(None, None)] * design.shape[1],
        method="highs",
    )
    if result.status == 0:
        raise SeparationError("separation detected: the outcome is perfectly predicted by a linear index")


def probit_mle(design: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float, int, bool]:
    """
    Newton-Raphson with step halving for the Probit log-likelihood.

    Stops when the sup-norm of the average score falls below ``1e-8`` or after
    100 iterations.

    Returns
    -------
    Tuple[np.ndarray, float, int, bool]
        Coefficients, log-likelihood, iterations and convergence flag.

    Raises
    ------
    SeparationError
        If the outcomes are separable or the coefficients diverge.
    RankDeficiencyError
        If the design or the Hessian is singular.
    """
    design = np.asarray(design, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, k = design.shape
    if np.linalg.matrix_rank(design) < k:
        raise RankDeficiencyError("Probit design matrix is rank deficient")
    check_separation(design, y)

    q = 2.0 * y - 1.0
    theta = np.zeros(k)
    loglik, gradient, hessian = _loglik_parts(theta, q, design)
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        try:
            step = np.linalg.solve(-hessian, gradient)
        except np.linalg.LinAlgError:
            raise RankDeficiencyError(f"singular Probit Hessian at iteration {iterations}") from None
        t = 1.0
        for _ in range(MAX_HALVINGS):
            candidate = theta + t * step
            new_loglik, new_gradient, new_hessian = _loglik_parts(candidate, q, design)
            if np.isfinite(new_loglik) and new_loglik >= loglik - 1e-12 * abs(loglik):
                break
            t /= 2.0
        theta, loglik, gradient, hessian = candidate, new_loglik, new_gradient, new_hessian
        if np.max(np.abs(theta)) > DIVERGENCE_BOUND:
            raise SeparationError("separation detected: Probit coefficients diverge")
        if np.max(np.abs(gradient)) / n < GRADIENT_TOL:
            converged = True
            break
    if not converged:
        logger.warning("Probit Newton-Raphson stopped after %d iterations", iterations)
    return theta, loglik, iterations, converged


def probit_fit(data: DataTable, regressors: Optional[Sequence[str]] = None, intercept: bool = True) -> ProbitFit:
    """
    Fit ``P(Y = 1) = Phi(gamma V + b0 + b'X)`` by maximum likelihood.

    Parameters
    ----------
    data : DataTable
        Table with outcome and special-regressor columns.
    regressors : Sequence[str], optional
        Regressor columns; by default every column tagged as a regressor.
    intercept : bool, optional
        Include ``b0`` under the name ``const``.

    Returns
    -------
    ProbitFit
        ``gamma`` and the ratios ``b_l / gamma``.

    Raises
    ------
    SeparationError
        On separated data or divergent ``gamma``.
    RankDeficiencyError
        On a singular design or Hessian.

    Examples
    --------
    .. code-block:: python

        fit = probit_fit(table)
        fit.ratios["x2"]  # estimate of b2 on the special-regressor scale
    """
    names = list(regressors) if regressors is not None else data.names_with_role(Role.REGRESSOR)
    if "const" in names:
        intercept = False
    labels = (["const"] if intercept else []) + names
    columns = [data.v]
    if intercept:
        columns.append(np.ones(data.n_rows))
    columns.extend(data.column(name) for name in names)
    design = np.column_stack(columns)
    if not labels:
        raise DataError("Probit needs at least an intercept or one regressor")

    theta, loglik, iterations, converged = probit_mle(design, data.y)
    gamma = float(theta[0])
    coefficients = {label: float(c) for label, c in zip(labels, theta[1:])}
    ratios = {label: c / gamma for label, c in coefficients.items()} if gamma != 0.0 else {}
    if gamma <= 0.0:
        logger.warning("Probit coefficient on the special regressor is %.4g; ratios are not meaningful", gamma)
    return ProbitFit(
        gamma=gamma, coefficients=coefficients, ratios=ratios, loglik=loglik, iterations=iterations, converged=converged
    )
