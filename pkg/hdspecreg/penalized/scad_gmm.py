"""
SCAD-penalised GMM with auxiliary invalidity parameters.

Instruments are split into ``k*`` known-valid ones ``Z*`` and ``d`` candidates
``Z_D``. Each candidate gets a parameter ``eta_j`` absorbing its moment
violation, so the stacked sample moments are linear in ``theta = (beta, eta)``:

    m(theta) = c - H theta,  c = n^-1 sum z_i y~_i,  H = [G, E],

with ``G = n^-1 sum z_i x_i'`` and ``E = [0; I_d]``. The estimator minimises

    Q(theta) = m(theta)' W m(theta) + sum_j J_lambda(|eta_j|)

and candidates with ``eta_j = 0`` are classified as valid.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from hdspecreg.common.exceptions import DataError, NumericalError, RankDeficiencyError, handle_exceptions
from hdspecreg.data import DataTable, SeedSpec, make_folds
from hdspecreg.penalized.scad import ScadParams, exact_zeros, scad_deriv, scad_penalty, soft_threshold
from hdspecreg.penalized.tuning import DEFAULT_A_GRID, DEFAULT_GRID_SIZE, DEFAULT_LAMBDA_RANGE, log_spaced_grid, select_from_table

logger = logging.getLogger(__name__)

OUTER_TOL = 1e-7
MAX_OUTER = 200
INNER_TOL = 1e-10
MAX_INNER = 10_000
MONOTONE_TOL = 1e-12
KKT_SLACK = 1e-6


@dataclass(frozen=True)
class IvLayout:
    """
    Column names of the known-valid instruments, the candidate instruments
    and the regressors.
    """

    known_valid: Tuple[str, ...]
    candidates: Tuple[str, ...]
    regressors: Tuple[str, ...]

    def __post_init__(self) -> None:
        for name in ("known_valid", "candidates", "regressors"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.known_valid:
            raise DataError("at least one known-valid instrument is required")
        if not self.regressors:
            raise DataError("at least one regressor is required")
        instruments = self.known_valid + self.candidates
        if len(set(instruments)) != len(instruments):
            raise DataError("known-valid and candidate instruments must be distinct")
        if len(set(self.regressors)) != len(self.regressors):
            raise DataError("regressor names must be distinct")
        if len(self.known_valid) < len(self.regressors):
            raise DataError(
                f"k*={len(self.known_valid)} known-valid instruments cannot identify s*={len(self.regressors)} regressors"
            )

    @property
    def instruments(self) -> Tuple[str, ...]:
        return self.known_valid + self.candidates


@dataclass(frozen=True)
class GmmProblem:
    """
    Instruments, regressors and transformed outcome for one SCAD-GMM fit.

    Attributes
    ----------
    layout : IvLayout
        Column roles.
    z : np.ndarray
        ``n x p_n`` instruments, known-valid first.
    x : np.ndarray
        ``n x s*`` regressors.
    y : np.ndarray
        Transformed outcome.
    """

    layout: IvLayout
    z: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=np.float64)
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64).ravel()
        if z.ndim != 2 or x.ndim != 2 or not z.shape[0] == x.shape[0] == y.shape[0]:
            raise DataError(f"dimension mismatch: z {z.shape}, x {x.shape}, y {y.shape}")
        if z.shape[1] != len(self.layout.instruments) or x.shape[1] != len(self.layout.regressors):
            raise DataError("dimension mismatch between arrays and IV layout")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DataError("non-finite value in GMM data")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_table(cls, table: DataTable, y_tilde: np.ndarray, layout: IvLayout) -> "GmmProblem":
        y_tilde = np.asarray(y_tilde, dtype=np.float64).ravel()
        if y_tilde.shape[0] != table.n_rows:
            raise DataError(f"{y_tilde.shape[0]} transformed outcomes for {table.n_rows} rows")
        return cls(layout, table.matrix(layout.instruments), table.matrix(layout.regressors), y_tilde)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def k_star(self) -> int:
        return len(self.layout.known_valid)

    @property
    def d(self) -> int:
        return len(self.layout.candidates)

    @property
    def s(self) -> int:
        return len(self.layout.regressors)

    @property
    def p_n(self) -> int:
        return self.z.shape[1]

    @cached_property
    def c(self) -> np.ndarray:
        return self.z.T @ self.y / self.n

    @cached_property
    def g(self) -> np.ndarray:
        return self.z.T @ self.x / self.n

    @cached_property
    def h(self) -> np.ndarray:
        e = np.vstack((np.zeros((self.k_star, self.d)), np.eye(self.d)))
        return np.hstack((self.g, e))

    def subset(self, rows: np.ndarray) -> "GmmProblem":
        return GmmProblem(self.layout, self.z[rows], self.x[rows], self.y[rows])

    def split(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return theta[: self.s], theta[self.s :]


@dataclass(frozen=True)
class GmmFit:
    """
    Result of :func:`fit_scad_gmm`.

    Attributes
    ----------
    beta : np.ndarray
        Regressor coefficients.
    eta : np.ndarray
        Candidate invalidity parameters, exact zeros below ``1e-10``.
    classified_valid : FrozenSet[int]
        Candidate positions with ``eta_j == 0``.
    params : ScadParams
        Tuning pair.
    weight : np.ndarray
        Weighting matrix ``W``.
    objective : float
        ``Q(theta)`` at the solution.
    converged : bool
        Whether the change criterion was met.
    iterations : int
        Outer iterations.
    objective_path : Tuple[float, ...]
        Objective at the start and after every outer iteration.
    sigma_hat : np.ndarray or None
        Sandwich covariance of ``(beta, eta_invalid)`` when computed.
    layout : IvLayout or None
        Column names for reporting.
    """

    beta: np.ndarray
    eta: np.ndarray
    classified_valid: FrozenSet[int]
    params: ScadParams
    weight: np.ndarray
    objective: float
    converged: bool
    iterations: int
    objective_path: Tuple[float, ...] = field(default=())
    sigma_hat: Optional[np.ndarray] = None
    layout: Optional[IvLayout] = None

    @property
    def theta(self) -> np.ndarray:
        return np.concatenate((self.beta, self.eta))

    @property
    def detected_invalid(self) -> List[int]:
        return [int(j) for j in np.flatnonzero(self.eta)]

    def with_sigma(self, sigma: np.ndarray) -> "GmmFit":
        return replace(self, sigma_hat=sigma)

    def report(self, n: Optional[int] = None) -> Dict[str, Any]:
        layout = self.layout
        regressors = list(layout.regressors) if layout else [f"b{j}" for j in range(self.beta.shape[0])]
        candidates = list(layout.candidates) if layout else [f"eta{j}" for j in range(self.eta.shape[0])]
        out: Dict[str, Any] = {
            "lambda": self.params.lam,
            "a": self.params.a,
            "iterations": self.iterations,
            "converged": self.converged,
            "objective": self.objective,
            "valid": ",".join(candidates[j] for j in sorted(self.classified_valid)),
            "invalid": ",".join(candidates[j] for j in self.detected_invalid),
            "beta": {name: float(b) for name, b in zip(regressors, self.beta)},
            "eta": {name: float(e) for name, e in zip(candidates, self.eta)},
        }
        if self.sigma_hat is not None and n:
            se = standard_errors(self.sigma_hat, n)
            labels = regressors + [candidates[j] for j in self.detected_invalid]
            out["std_error"] = {label: float(s) for label, s in zip(labels, se)}
        return out


@dataclass(frozen=True)
class KktCheck:
    """
    First-order check for one candidate instrument.

    ``score`` is ``e_j' W m(theta)`` for the candidate's moment. A zero
    ``eta`` passes when ``|score| < lambda / 2`` (plus slack); a non-zero one
    passes when it is stationary, ``score = sign(eta) J'(|eta|) / 2``.
    ``beyond_a_lambda`` records ``|eta| > a lambda``, where the penalty is
    flat.
    """

    candidate: int
    eta: float
    score: float
    passes: bool
    beyond_a_lambda: bool


def check_weight(W: np.ndarray, p_n: int) -> np.ndarray:
    """
    Validate a weighting matrix: square of size ``p_n``, symmetric, positive
    definite.

    Raises
    ------
    DataError
        If any condition fails.
    """
    W = np.asarray(W, dtype=np.float64)
    if W.shape != (p_n, p_n):
        raise DataError(f"weight matrix has shape {W.shape}, expected ({p_n}, {p_n})")
    if not np.allclose(W, W.T, rtol=1e-10, atol=1e-12):
        raise DataError("weight matrix is not symmetric")
    try:
        np.linalg.cholesky(W)
    except np.linalg.LinAlgError:
        raise DataError("weight matrix is not positive definite") from None
    return W


def sample_moments(problem: GmmProblem, beta: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """
    Stacked moments ``n^-1 sum z*_i (y~_i - x_i'b)`` and
    ``n^-1 sum z_Di (y~_i - x_i'b) - eta``.
    """
    beta = np.asarray(beta, dtype=np.float64).ravel()
    eta = np.asarray(eta, dtype=np.float64).ravel()
    if beta.shape[0] != problem.s or eta.shape[0] != problem.d:
        raise DataError(f"theta sizes ({beta.shape[0]}, {eta.shape[0]}) do not match ({problem.s}, {problem.d})")
    return problem.c - problem.h @ np.concatenate((beta, eta))


def moment_contributions(problem: GmmProblem, beta: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """
    ``n x p_n`` per-observation moments ``g_i``; their mean is
    :func:`sample_moments`.
    """
    resid = problem.y - problem.x @ beta
    g = problem.z * resid[:, None]
    g[:, problem.k_star :] -= eta[None, :]
    return g


def gmm_objective(
    problem: GmmProblem, beta: np.ndarray, eta: np.ndarray, W: np.ndarray, params: Optional[ScadParams] = None
) -> float:
    """
    ``m' W m`` plus the SCAD penalty on ``eta`` (``beta`` is unpenalised).

    Parameters
    ----------
    problem : GmmProblem
        Data.
    beta, eta : np.ndarray
        Parameters.
    W : np.ndarray
        Symmetric positive definite weighting matrix.
    params : ScadParams, optional
        Penalty; None gives the unpenalised quadratic form.

    Returns
    -------
    float
        Objective value.
    """
    W = check_weight(W, problem.p_n)
    m = sample_moments(problem, beta, eta)
    value = float(m @ W @ m)
    if params is not None:
        value += float(np.sum(scad_penalty(np.asarray(eta, dtype=np.float64), params)))
    return value


def _quadratic(problem: GmmProblem, W: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    hw = problem.h.T @ W
    return hw @ problem.h, hw @ problem.c


def _solve_free(a_mat: np.ndarray, b_vec: np.ndarray, free: np.ndarray) -> np.ndarray:
    theta = np.zeros(b_vec.shape[0])
    if free.any():
        try:
            theta[free] = np.linalg.solve(a_mat[np.ix_(free, free)], b_vec[free])
        except np.linalg.LinAlgError:
            raise RankDeficiencyError("GMM normal equations are singular") from None
    return theta


def gmm_closed_form(
    problem: GmmProblem, W: np.ndarray, valid_candidates: Iterable[int] = ()
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unpenalised GMM treating ``valid_candidates`` as valid (their ``eta`` is
    fixed at 0) and estimating ``eta`` for the rest.

    With no valid candidates this is GMM on the known-valid instruments and
    ``eta`` equals the candidates' residual moments; with all candidates
    valid it is plain GMM on every instrument.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray]
        ``(beta, eta)``.

    Raises
    ------
    RankDeficiencyError
        If the normal equations are singular.
    """
    W = check_weight(W, problem.p_n)
    a_mat, b_vec = _quadratic(problem, W)
    free = np.ones(problem.s + problem.d, dtype=bool)
    for j in valid_candidates:
        if not 0 <= j < problem.d:
            raise DataError(f"candidate index {j} out of range [0, {problem.d})")
        free[problem.s + j] = False
    return problem.split(_solve_free(a_mat, b_vec, free))


def _weighted_cd(a_mat: np.ndarray, b_vec: np.ndarray, theta: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # minimises theta'A theta - 2 b'theta + sum_k w_k |theta_k|
    theta = theta.copy()
    a_theta = a_mat @ theta
    diag = np.diag(a_mat)
    for _ in range(MAX_INNER):
        max_change = 0.0
        for k in range(theta.shape[0]):
            old = theta[k]
            r = b_vec[k] - a_theta[k] + diag[k] * old
            new = soft_threshold(r, weights[k] / 2.0) / diag[k]
            if new != old:
                a_theta += a_mat[:, k] * (new - old)
                theta[k] = new
                max_change = max(max_change, abs(new - old))
        if max_change < INNER_TOL:
            break
    return theta


def _polish(a_mat: np.ndarray, b_vec: np.ndarray, theta: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    Solve the weighted problem exactly on the active pattern found by
    coordinate descent; keep the descent iterate if the signs or the zero
    conditions do not hold for the exact solution.
    """
    active = theta != 0.0
    if not active.any():
        return theta
    signs = np.sign(theta)
    rhs = b_vec - weights * signs / 2.0
    try:
        exact_active = np.linalg.solve(a_mat[np.ix_(active, active)], rhs[active])
    except np.linalg.LinAlgError:
        return theta
    candidate = np.zeros_like(theta)
    candidate[active] = exact_active
    penalised_active = active & (weights > 0)
    if np.any(np.sign(candidate[penalised_active]) != signs[penalised_active]):
        return theta
    score = b_vec - a_mat @ candidate
    if np.any(np.abs(score[~active]) > weights[~active] / 2.0 + KKT_SLACK):
        return theta
    return candidate


def fit_scad_gmm(
    problem: GmmProblem,
    W: np.ndarray,
    params: ScadParams,
    init: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> GmmFit:
    """
    SCAD-GMM by local linear approximation of the penalty.

    Each outer step fixes the penalty weights ``J'(|eta_j|)`` at the current
    iterate and minimises the resulting weighted-l1 quadratic by coordinate
    descent, then solves the linear system on the active pattern exactly.
    ``beta`` carries no penalty.

    Parameters
    ----------
    problem : GmmProblem
        Data.
    W : np.ndarray
        Weighting matrix.
    params : ScadParams
        Tuning pair.
    init : Tuple[np.ndarray, np.ndarray], optional
        Starting ``(beta, eta)``; by default the known-valid GMM pilot with
        ``eta`` set to the candidates' residual moments.

    Returns
    -------
    GmmFit
        Returned unconverged when the outer budget runs out.

    Raises
    ------
    RankDeficiencyError
        If ``n^-1 sum z* x'`` has rank below ``s*``.
    """
    W = check_weight(W, problem.p_n)
    if np.linalg.matrix_rank(problem.g[: problem.k_star]) < problem.s:
        raise RankDeficiencyError("known-valid instruments do not identify the regressors (rank condition)")

    a_mat, b_vec = _quadratic(problem, W)
    if init is None:
        beta0, eta0 = gmm_closed_form(problem, W, ())
    else:
        beta0, eta0 = (np.asarray(part, dtype=np.float64).ravel() for part in init)
    theta = np.concatenate((beta0, eta0))
    if theta.shape[0] != problem.s + problem.d:
        raise DataError(f"init has {theta.shape[0]} entries, expected {problem.s + problem.d}")

    def objective(t: np.ndarray) -> float:
        m = problem.c - problem.h @ t
        return float(m @ W @ m + np.sum(scad_penalty(t[problem.s :], params)))

    path = [objective(theta)]
    converged = False
    iterations = 0
    for iterations in range(1, MAX_OUTER + 1):
        weights = np.concatenate((np.zeros(problem.s), scad_deriv(np.abs(theta[problem.s :]), params)))
        new_theta = _polish(a_mat, b_vec, _weighted_cd(a_mat, b_vec, theta, weights), weights)
        value = objective(new_theta)
        if not np.isfinite(value):
            raise NumericalError(f"non-finite SCAD-GMM objective at iteration {iterations}")
        if value > path[-1] + MONOTONE_TOL * max(1.0, abs(path[-1])):
            # surrogate step did not descend; keep the previous iterate
            logger.warning("SCAD-GMM objective increased from %.12g to %.12g; stopping", path[-1], value)
            break
        change = float(np.max(np.abs(new_theta - theta)))
        theta = new_theta
        path.append(value)
        if change < OUTER_TOL:
            converged = True
            break

    if not converged:
        logger.warning("SCAD-GMM stopped after %d iterations (lambda=%.4g, a=%.2f)", iterations, params.lam, params.a)

    beta, eta = problem.split(theta)
    eta = exact_zeros(eta)
    return GmmFit(
        beta=beta.copy(),
        eta=eta,
        classified_valid=frozenset(int(j) for j in np.flatnonzero(eta == 0.0)),
        params=params,
        weight=W,
        objective=gmm_objective(problem, beta, eta, W, params),
        converged=converged,
        iterations=iterations,
        objective_path=tuple(path),
        layout=problem.layout,
    )


def kkt_validity_check(
    problem: GmmProblem, fit: GmmFit, params: Optional[ScadParams] = None, slack: float = KKT_SLACK
) -> List[KktCheck]:
    """
    Certify each candidate's classification from the first-order conditions.

    Parameters
    ----------
    problem : GmmProblem
        Data the fit was computed on.
    fit : GmmFit
        Fitted parameters.
    params : ScadParams, optional
        Penalty; defaults to ``fit.params``.
    slack : float, optional
        Numerical tolerance.

    Returns
    -------
    List[KktCheck]
        One entry per candidate.
    """
    params = params or fit.params
    weighted = fit.weight @ sample_moments(problem, fit.beta, fit.eta)
    checks = []
    for j in range(problem.d):
        eta = float(fit.eta[j])
        score = float(weighted[problem.k_star + j])
        if eta == 0.0:
            passes = abs(score) < params.lam / 2.0 + slack
        else:
            target = math.copysign(float(scad_deriv(abs(eta), params)), eta) / 2.0
            passes = abs(score - target) <= slack
        checks.append(
            KktCheck(candidate=j, eta=eta, score=score, passes=bool(passes), beyond_a_lambda=abs(eta) > params.a * params.lam)
        )
    return checks


def gamma_theta(problem: GmmProblem, detected_invalid: Iterable[int]) -> np.ndarray:
    """
    Jacobian block ``[n^-1 sum z x', -E_B]`` of size
    ``p_n x (s* + |B|)``, where ``E_B`` selects the detected-invalid
    candidates' moment rows.
    """
    detected = sorted(set(int(j) for j in detected_invalid))
    if any(not 0 <= j < problem.d for j in detected):
        raise DataError(f"detected set {detected} out of range [0, {problem.d})")
    e_b = np.zeros((problem.p_n, len(detected)))
    for col, j in enumerate(detected):
        e_b[problem.k_star + j, col] = -1.0
    return np.hstack((problem.g, e_b))


def sigma_hat(problem: GmmProblem, fit: GmmFit, W: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Sandwich covariance ``(G'WG)^-1 G'W Omega W G (G'WG)^-1`` with ``G`` from
    :func:`gamma_theta` and the plug-in ``Omega = n^-1 sum g_i g_i'``.

    Raises
    ------
    RankDeficiencyError
        If ``G'WG`` is singular.
    """
    W = check_weight(fit.weight if W is None else W, problem.p_n)
    gamma = gamma_theta(problem, fit.detected_invalid)
    contributions = moment_contributions(problem, fit.beta, fit.eta)
    omega = contributions.T @ contributions / problem.n
    bread = gamma.T @ W @ gamma
    try:
        bread_inv = np.linalg.inv(bread)
    except np.linalg.LinAlgError:
        raise RankDeficiencyError("Gamma' W Gamma is singular") from None
    meat = gamma.T @ W @ omega @ W @ gamma
    sigma = bread_inv @ meat @ bread_inv
    return (sigma + sigma.T) / 2.0


def standard_errors(sigma: np.ndarray, n: int) -> np.ndarray:
    return np.sqrt(np.clip(np.diag(sigma), 0.0, None) / n)


def two_step_weight(problem: GmmProblem, beta: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """
    Efficient weighting ``Omega^-1`` evaluated at a pilot ``(beta, eta)``.

    Raises
    ------
    RankDeficiencyError
        If ``Omega`` is singular.
    """
    contributions = moment_contributions(problem, np.asarray(beta, dtype=np.float64), np.asarray(eta, dtype=np.float64))
    omega = contributions.T @ contributions / problem.n
    try:
        weight = np.linalg.inv(omega)
    except np.linalg.LinAlgError:
        raise RankDeficiencyError("moment covariance is singular; two-step weighting unavailable") from None
    return (weight + weight.T) / 2.0


def default_gmm_lambda_grid(
    problem: GmmProblem, size: int = DEFAULT_GRID_SIZE, lam_range: Sequence[float] = DEFAULT_LAMBDA_RANGE
) -> np.ndarray:
    """
    Grid scaled by ``sd(y~) * sqrt(p_n / n)``.
    """
    return log_spaced_grid(np.std(problem.y, ddof=1) * math.sqrt(problem.p_n / problem.n), size, lam_range)


def cv_select_gmm_tuning(
    problem: GmmProblem,
    W: np.ndarray,
    lambda_grid: Iterable[float],
    a_grid: Iterable[float] = DEFAULT_A_GRID,
    k: int = 10,
    seed: Optional[SeedSpec] = None,
) -> Tuple[ScadParams, pd.DataFrame]:
    """
    Choose ``(lambda, a)`` by the held-out unpenalised GMM criterion.

    For every fold the model is fitted on the training rows and scored by
    ``m_test(theta)' W m_test(theta)`` on the held-out rows; scores are
    averaged over folds. Ties go to the larger lambda, then the smaller a.

    Returns
    -------
    Tuple[ScadParams, pd.DataFrame]
        The selected pair and the table of ``lambda``, ``a``, ``cv_error`` and
        ``failed_folds``.
    """
    W = check_weight(W, problem.p_n)
    lams = np.sort(np.asarray(list(lambda_grid), dtype=np.float64))[::-1]
    a_values = np.asarray(list(a_grid), dtype=np.float64)
    if lams.size == 0 or a_values.size == 0:
        raise DataError("tuning grids must be non-empty")
    folds = make_folds(problem.n, k, seed or SeedSpec(0))

    score = np.zeros((a_values.size, lams.size))
    failed = np.zeros((a_values.size, lams.size), dtype=int)

    @handle_exceptions(default_return_value=None, log_exception=False)
    def fit_cell(train: GmmProblem, params: ScadParams, init: Optional[Tuple[np.ndarray, np.ndarray]]) -> GmmFit:
        return fit_scad_gmm(train, W, params, init=init)

    for train_idx, test_idx in folds.splits():
        train, test = problem.subset(train_idx), problem.subset(test_idx)
        for ia, a in enumerate(a_values):
            warm: Optional[Tuple[np.ndarray, np.ndarray]] = None
            for il, lam in enumerate(lams):
                fit = fit_cell(train, ScadParams(lam, a), warm)
                if fit is None:
                    failed[ia, il] += 1
                    continue
                warm = (fit.beta, fit.eta)
                score[ia, il] += gmm_objective(test, fit.beta, fit.eta, W)

    rows = []
    for ia, a in enumerate(a_values):
        for il, lam in enumerate(lams):
            value = score[ia, il] / k if failed[ia, il] == 0 else np.nan
            rows.append({"lambda": lam, "a": a, "cv_error": value, "failed_folds": int(failed[ia, il])})
    table = pd.DataFrame(rows)
    params = select_from_table(table)
    logger.debug("SCAD-GMM cross-validation selected lambda=%.5g a=%.2f", params.lam, params.a)
    return params, table


def fit_scad_gmm_cv(
    problem: GmmProblem,
    weighting: str = "identity",
    lambda_grid: Optional[Iterable[float]] = None,
    a_grid: Iterable[float] = DEFAULT_A_GRID,
    k: int = 10,
    seed: Optional[SeedSpec] = None,
) -> Tuple[GmmFit, pd.DataFrame]:
    """
    Weighting, tuning, full-sample fit and sandwich covariance in one call.

    Parameters
    ----------
    problem : GmmProblem
        Data.
    weighting : {"identity", "two_step"}, optional
        ``"two_step"`` uses ``Omega^-1`` at the known-valid pilot.
    lambda_grid : Iterable[float], optional
        Defaults to :func:`default_gmm_lambda_grid`.
    a_grid : Iterable[float], optional
        Candidate ``a`` values.
    k : int, optional
        Folds.
    seed : SeedSpec, optional
        Stream for the fold split.

    Returns
    -------
    Tuple[GmmFit, pd.DataFrame]
        Fit with ``sigma_hat`` attached, and the cross-validation table.
    """
    W = np.eye(problem.p_n)
    if weighting == "two_step":
        W = two_step_weight(problem, *gmm_closed_form(problem, W, ()))
    elif weighting != "identity":
        raise DataError(f"unknown weighting '{weighting}'")
    if lambda_grid is None:
        lambda_grid = default_gmm_lambda_grid(problem)
    params, table = cv_select_gmm_tuning(problem, W, lambda_grid, a_grid, k, seed)
    fit = fit_scad_gmm(problem, W, params)
    return fit.with_sigma(sigma_hat(problem, fit, W)), table
