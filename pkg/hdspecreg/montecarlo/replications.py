"""
Monte Carlo replication runner.

Replication ``r`` draws its sample from the stream ``SeedSpec(base_seed, r)``
and its fold splits from a sibling stream, so a report depends only on the
base seed and never on the number of workers or the order in which
replications finish.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from hdspecreg.common.exceptions import DataError, handle_exceptions
from hdspecreg.data import DataTable, SeedSpec
from hdspecreg.montecarlo.designs import (
    CONSTANT_COLUMN,
    PROBIT_SCALE,
    DesignSpec,
    DesignTruth,
    design_regressor_matrix,
    design_truth,
    gen_design,
)
from hdspecreg.montecarlo.metrics import MAD_CENTERS, metrics_table
from hdspecreg.montecarlo.probit import probit_fit
from hdspecreg.penalized import (
    GmmProblem,
    IvLayout,
    default_gmm_lambda_grid,
    default_lambda_grid,
    fit_scad_gmm_cv,
    fit_scad_ls_cv,
    gmm_closed_form,
    kkt_residuals,
    kkt_validity_check,
    oracle_fit,
)
from hdspecreg.penalized.tuning import DEFAULT_A_GRID, DEFAULT_GRID_SIZE, DEFAULT_LAMBDA_RANGE
from hdspecreg.screening import names_to_indices, tpr_fdr
from hdspecreg.special_regressor import TransformConfig, TransformedData, transform

logger = logging.getLogger(__name__)

SCAD_LS = "scad_ls"
SCAD_GMM = "scad_gmm"
PROBIT = "probit"
ORACLE = "oracle"
ESTIMATORS = (SCAD_LS, SCAD_GMM, PROBIT, ORACLE)

DESK_REPLICATIONS = 200
FULL_REPLICATIONS = 1000
KKT_TOLERANCE = 1e-6
# offset of the fold-split stream from the sample stream
FOLD_STREAM_OFFSET = 1


@dataclass(frozen=True)
class PipelineConfig:
    """
    Estimation settings shared by every replication.

    Attributes
    ----------
    transform : TransformConfig
        Screening, density and transform settings.
    a_grid : Tuple[float, ...]
        Candidate SCAD ``a`` values.
    lambda_grid_size : int
        Points in the data-scaled lambda grid.
    lambda_range : Tuple[float, float]
        Grid endpoints as multiples of the data scale.
    folds : int
        Cross-validation folds.
    weighting : str
        SCAD-GMM weighting, ``"identity"`` or ``"two_step"``.
    """

    transform: TransformConfig = field(default_factory=TransformConfig)
    a_grid: Tuple[float, ...] = DEFAULT_A_GRID
    lambda_grid_size: int = DEFAULT_GRID_SIZE
    lambda_range: Tuple[float, float] = DEFAULT_LAMBDA_RANGE
    folds: int = 10
    weighting: str = "identity"

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_grid", tuple(float(a) for a in self.a_grid))
        object.__setattr__(self, "lambda_range", tuple(float(x) for x in self.lambda_range))
        if self.weighting not in ("identity", "two_step"):
            raise DataError(f"unknown weighting '{self.weighting}'")


@dataclass
class ReplicationResult:
    """
    Everything one replication contributes to the report.

    ``estimates`` maps estimator to coefficient name to estimate; a missing
    estimator failed and is listed in ``failures``.
    """

    replication: int
    estimates: Dict[str, Dict[str, float]] = field(default_factory=dict)
    selection: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    elapsed: float = 0.0


@dataclass(frozen=True)
class McReport:
    """
    Aggregated results of :func:`run_replications`.

    Attributes
    ----------
    spec : DesignSpec
        Simulated design.
    replications : int
        Requested replications.
    seed : int
        Base seed.
    estimators : Tuple[str, ...]
        Estimators run.
    mad_center : str
        Centre used for the MAD column.
    metrics : Dict[str, pd.DataFrame]
        Per estimator, MEANB, RMSE, MEDB and MAD per coefficient.
    selection : Dict[str, float]
        Selection rates and averages over replications.
    failures : Dict[str, int]
        Failed replications per estimator.
    timing : Dict[str, float]
        Wall-clock seconds per replication (mean, max) and in total.
    records : pd.DataFrame
        One row per replication with every estimate and selection outcome.
    """

    spec: DesignSpec
    replications: int
    seed: int
    estimators: Tuple[str, ...]
    mad_center: str
    metrics: Dict[str, pd.DataFrame]
    selection: Dict[str, float]
    failures: Dict[str, int]
    timing: Dict[str, float]
    records: pd.DataFrame

    def metric_records(self) -> List[Dict[str, Any]]:
        rows = []
        for estimator, table in self.metrics.items():
            for coefficient, values in table.iterrows():
                rows.append({"estimator": estimator, "coefficient": coefficient, **values.to_dict()})
        return rows

    def summary_record(self) -> Dict[str, Any]:
        return {
            "design": self.spec.design,
            "n": self.spec.n,
            "p_n": self.spec.p_n,
            "replications": self.replications,
            "seed": self.seed,
            "estimators": ",".join(self.estimators),
            "mad_center": self.mad_center,
            "failures": dict(self.failures),
            "selection": dict(self.selection),
            "timing": dict(self.timing),
        }


def default_estimators(spec: DesignSpec) -> Tuple[str, ...]:
    return (SCAD_GMM, ORACLE) if spec.is_moment_selection else (SCAD_LS, PROBIT, ORACLE)


def _check_estimators(spec: DesignSpec, estimators: Iterable[str]) -> Tuple[str, ...]:
    chosen = tuple(dict.fromkeys(estimators))
    unknown = [e for e in chosen if e not in ESTIMATORS]
    if unknown:
        raise DataError(f"unknown estimator(s) {unknown}; choose from {ESTIMATORS}")
    if SCAD_LS in chosen and spec.is_moment_selection:
        raise DataError(f"{SCAD_LS} applies to designs 1-3, not design {spec.design}")
    if SCAD_GMM in chosen and not spec.is_moment_selection:
        raise DataError(f"{SCAD_GMM} applies to designs 4-6, not design {spec.design}")
    return chosen


def _guarded(name: str, replication: int, result: ReplicationResult, func: Callable[..., Any], *args: Any) -> Any:
    outcome = handle_exceptions(default_return_value=None, log_exception=False)(func)(*args)
    if outcome is None:
        logger.warning("Replication %d: %s failed and is excluded", replication, name)
        result.failures.append(name)
    return outcome


def _screen_outcomes(tr: TransformedData, truth: DesignTruth, selection: Dict[str, float]) -> List[str]:
    screen = tr.screen
    if screen is None:
        raise DataError("transform returned no screening report")
    truth_idx = names_to_indices(list(screen.names), truth.relevant_to_v)
    selection["screen_tpr"], selection["screen_fdr"] = tpr_fdr(screen.selected, truth_idx, screen.p_n)
    selection["floor_hits"] = float(tr.floor_hits)
    return screen.selected_names()


def _variable_selection(
    table: DataTable,
    truth: DesignTruth,
    tr: TransformedData,
    cfg: PipelineConfig,
    seed: SeedSpec,
    estimators: Tuple[str, ...],
    result: ReplicationResult,
) -> None:
    kept = _screen_outcomes(tr, truth, result.selection)
    for name in truth.relevant_to_v:
        result.selection[f"screen_{name}"] = float(name in kept)

    X = design_regressor_matrix(table, truth)
    if SCAD_LS in estimators:

        def scad_ls() -> Any:
            grid = default_lambda_grid(X, tr.y_tilde, cfg.lambda_grid_size, cfg.lambda_range)
            return fit_scad_ls_cv(X, tr.y_tilde, grid, cfg.a_grid, cfg.folds, seed.child(FOLD_STREAM_OFFSET), unpenalized=(0,))[0]

        fit = _guarded(SCAD_LS, result.replication, result, scad_ls)
        if fit is not None:
            result.estimates[SCAD_LS] = dict(zip(truth.regressors, map(float, fit.beta)))
            # x1 is relevant to V but not to Y
            result.selection["beta1_zero"] = float(fit.beta[truth.regressors.index("x1")] == 0.0)
            result.selection["l0_norm"] = float(np.count_nonzero(fit.beta))
            if fit.converged:
                result.selection["kkt_ok"] = float(np.max(kkt_residuals(X, tr.y_tilde, fit)) <= KKT_TOLERANCE)
    if ORACLE in estimators:
        support = [truth.regressors.index(name) for name in (CONSTANT_COLUMN, *truth.support)]
        beta = _guarded(ORACLE, result.replication, result, oracle_fit, X, tr.y_tilde, support)
        if beta is not None:
            result.estimates[ORACLE] = dict(zip(truth.regressors, map(float, beta)))


def _moment_selection(
    table: DataTable,
    truth: DesignTruth,
    tr: TransformedData,
    cfg: PipelineConfig,
    seed: SeedSpec,
    estimators: Tuple[str, ...],
    result: ReplicationResult,
) -> None:
    kept = _screen_outcomes(tr, truth, result.selection)
    result.selection["screen_relevant"] = float(all(name in kept for name in truth.relevant_to_v))

    layout = IvLayout(truth.known_valid, truth.candidates, truth.regressors)
    problem = GmmProblem.from_table(table, tr.y_tilde, layout)
    if SCAD_GMM in estimators:

        def scad_gmm() -> Any:
            grid = default_gmm_lambda_grid(problem, cfg.lambda_grid_size, cfg.lambda_range)
            return fit_scad_gmm_cv(problem, cfg.weighting, grid, cfg.a_grid, cfg.folds, seed.child(FOLD_STREAM_OFFSET))[0]

        fit = _guarded(SCAD_GMM, result.replication, result, scad_gmm)
        if fit is not None:
            result.estimates[SCAD_GMM] = dict(zip(truth.regressors, map(float, fit.beta)))
            valid = {truth.candidates[j] for j in fit.classified_valid}
            result.selection["invalid_all_detected"] = float(not valid & set(truth.invalid))
            result.selection["valid_selected"] = float(len(valid & set(truth.valid)))
            if fit.converged:
                result.selection["kkt_ok"] = float(all(check.passes for check in kkt_validity_check(problem, fit)))
    if ORACLE in estimators:
        valid_idx = list(range(len(truth.valid)))
        beta_eta = _guarded(ORACLE, result.replication, result, gmm_closed_form, problem, np.eye(problem.p_n), valid_idx)
        if beta_eta is not None:
            result.estimates[ORACLE] = dict(zip(truth.regressors, map(float, beta_eta[0])))


def run_one_replication(
    spec: DesignSpec, estimators: Tuple[str, ...], cfg: PipelineConfig, base_seed: int, replication: int
) -> ReplicationResult:
    """
    Draw replication ``replication`` and run the requested estimators on it.

    Failures of individual estimators are caught, logged with the replication
    id and listed in the result.
    """
    started = time.perf_counter()
    seed = SeedSpec(base_seed, replication)
    result = ReplicationResult(replication=replication)
    table, truth = gen_design(spec, seed)

    if PROBIT in estimators:
        probit_regressors = [name for name in truth.regressors if name != CONSTANT_COLUMN]
        fit = _guarded(PROBIT, replication, result, probit_fit, table, probit_regressors)
        if fit is not None:
            result.estimates[PROBIT] = dict(fit.ratios)
            result.selection["probit_gamma"] = fit.gamma

    needs_transform = [e for e in estimators if e != PROBIT]
    if needs_transform:
        tr_cfg = replace(cfg.transform, conditioning=truth.conditioning, seed=seed)
        tr = _guarded("transform", replication, result, transform, table, tr_cfg)
        if tr is None:
            result.failures.extend(needs_transform)
        elif spec.is_moment_selection:
            _moment_selection(table, truth, tr, cfg, seed, estimators, result)
        else:
            _variable_selection(table, truth, tr, cfg, seed, estimators, result)

    result.elapsed = time.perf_counter() - started
    return result


def _run_task(args: Tuple[DesignSpec, Tuple[str, ...], PipelineConfig, int, int]) -> ReplicationResult:
    return run_one_replication(*args)


def _records_frame(results: List[ReplicationResult]) -> pd.DataFrame:
    rows = []
    for res in results:
        row: Dict[str, Any] = {"replication": res.replication, "elapsed": res.elapsed, "failures": ",".join(res.failures)}
        for estimator, coefs in res.estimates.items():
            row.update({f"{estimator}_{name}": value for name, value in coefs.items()})
        row.update(res.selection)
        rows.append(row)
    return pd.DataFrame(rows).sort_values("replication", kind="mergesort").reset_index(drop=True)


def aggregate(
    spec: DesignSpec,
    results: List[ReplicationResult],
    estimators: Tuple[str, ...],
    seed: int,
    mad_center: str = "median",
) -> McReport:
    """
    Reduce per-replication results to an :class:`McReport`; results are
    sorted by replication id first.
    """
    results = sorted(results, key=lambda res: res.replication)
    truth = design_truth(spec)
    metrics: Dict[str, pd.DataFrame] = {}
    for estimator in estimators:
        rows = [res.estimates[estimator] for res in results if estimator in res.estimates]
        if rows:
            frame = pd.DataFrame(rows, columns=list(truth.regressors))
            metrics[estimator] = metrics_table(frame, truth.beta, mad_center)

    keys = sorted({key for res in results for key in res.selection})
    selection: Dict[str, float] = {}
    for key in keys:
        values = [res.selection[key] for res in results if key in res.selection]
        # 0/1 outcomes average to rates
        selection[key] = float(np.mean(values))
    if "probit_gamma" in selection:
        selection["probit_gamma_true"] = PROBIT_SCALE

    failures = {estimator: sum(estimator in res.failures for res in results) for estimator in estimators}
    elapsed = np.array([res.elapsed for res in results])
    timing = {
        "mean_seconds": float(elapsed.mean()) if elapsed.size else 0.0,
        "max_seconds": float(elapsed.max()) if elapsed.size else 0.0,
        "total_seconds": float(elapsed.sum()),
    }
    return McReport(
        spec=spec,
        replications=len(results),
        seed=seed,
        estimators=estimators,
        mad_center=mad_center,
        metrics=metrics,
        selection=selection,
        failures=failures,
        timing=timing,
        records=_records_frame(results),
    )


def run_replications(
    spec: DesignSpec,
    estimators: Optional[Iterable[str]] = None,
    replications: int = DESK_REPLICATIONS,
    cfg: Optional[PipelineConfig] = None,
    seed: int = 7,
    workers: int = 1,
    mad_center: str = "median",
) -> McReport:
    """
    Run a Monte Carlo experiment on one design cell.

    Parameters
    ----------
    spec : DesignSpec
        Design, sample size and dimension.
    estimators : Iterable[str], optional
        Subset of ``scad_ls``, ``scad_gmm``, ``probit`` and ``oracle``; by
        default SCAD-LS, Probit and the oracle for designs 1-3 and SCAD-GMM
        and the oracle for designs 4-6.
    replications : int, optional
        Number of replications ``R``.
    cfg : PipelineConfig, optional
        Estimation settings.
    seed : int, optional
        Base seed; replication ``r`` uses stream ``r``.
    workers : int, optional
        Worker processes; 1 runs in the calling process.
    mad_center : {"median", "truth"}, optional
        Centre of the MAD column.

    Returns
    -------
    McReport
        Identical for any worker count, timing aside.

    Raises
    ------
    DataError
        For ``replications < 1``, ``workers < 1`` or an estimator that does
        not apply to the design.

    Examples
    --------
    .. code-block:: python

        report = run_replications(DesignSpec(design=1, n=500), replications=200, seed=7, workers=4)
        report.metrics["scad_ls"].loc["x2", "MEANB"]
    """
    if replications < 1:
        raise DataError(f"replications must be >= 1, got {replications}")
    if workers < 1:
        raise DataError(f"workers must be >= 1, got {workers}")
    if mad_center not in MAD_CENTERS:
        raise DataError(f"mad_center must be one of {MAD_CENTERS}, got '{mad_center}'")
    chosen = _check_estimators(spec, default_estimators(spec) if estimators is None else estimators)
    cfg = cfg or PipelineConfig()

    tasks = [(spec, chosen, cfg, seed, r) for r in range(replications)]
    logger.info("Running %d replications of %s with %s on %d worker(s)", replications, spec.label(), chosen, workers)
    if workers == 1:
        results = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_task, tasks))

    report = aggregate(spec, results, chosen, seed, mad_center)
    failed = {name: count for name, count in report.failures.items() if count}
    if failed:
        logger.warning("Failed replications per estimator: %s", failed)
    return report
