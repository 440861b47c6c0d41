"""
Bandwidth selection by minimising the cross-validation criterion.

The search runs scipy's bounded Nelder-Mead simplex on log-bandwidths from
several starting points around the rule-of-thumb bandwidths and keeps the best
result.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from hdspecreg.common.exceptions import DataError, OptimizerError, handle_exceptions
from hdspecreg.density.cross_validation import cv_criterion
from hdspecreg.density.density_model import BandwidthVector, DensityModel, DensitySample
from hdspecreg.density.kernels import KernelSpec

logger = logging.getLogger(__name__)

# bandwidths within this factor of the upper bound count as smoothed out
SMOOTHED_OUT_FACTOR = 0.99


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Settings of the multi-start simplex search.

    Attributes
    ----------
    restarts : int
        Number of starting points used, taken from ``start_multipliers``.
    start_multipliers : Tuple[float, ...]
        Starting points as multiples of the rule-of-thumb bandwidths.
    max_evals_per_dim : int
        Criterion evaluations per restart are capped at this times ``d + 1``.
    fatol : float
        Stop when the simplex values differ by less than this.
    xatol : float
        Stop when the simplex vertices (in log-bandwidth) differ by less than
        this.
    lower_multiplier, upper_multiplier : float
        Search bounds as multiples of each coordinate's standard deviation.
    """

    restarts: int = 3
    start_multipliers: Tuple[float, ...] = (0.5, 1.0, 2.0)
    max_evals_per_dim: int = 500
    fatol: float = 1e-8
    xatol: float = 1e-4
    lower_multiplier: float = 1e-3
    upper_multiplier: float = 1e3

    def __post_init__(self) -> None:
        object.__setattr__(self, "start_multipliers", tuple(float(m) for m in self.start_multipliers))
        if not 1 <= self.restarts <= len(self.start_multipliers):
            raise DataError(f"restarts must be in [1, {len(self.start_multipliers)}], got {self.restarts}")
        if self.max_evals_per_dim < 1:
            raise DataError("max_evals_per_dim must be >= 1")
        if not 0 < self.lower_multiplier < self.upper_multiplier:
            raise DataError("bound multipliers must satisfy 0 < lower < upper")


@dataclass
class RestartResult:
    start: np.ndarray
    h: np.ndarray
    value: float
    evaluations: int
    message: str = ""


@dataclass
class SearchDiagnostics:
    restarts: List[RestartResult] = field(default_factory=list)

    def summary(self) -> str:
        return "; ".join(
            f"start={np.round(r.start, 4).tolist()} value={r.value:.6g} evals={r.evaluations} ({r.message})"
            for r in self.restarts
        )


def rule_of_thumb_bandwidths(sample: DensitySample) -> BandwidthVector:
    """
    ``1.06 * sd * n^(-1/(4+d))`` for ``v`` and every conditioning variable.
    """
    factor = 1.06 * sample.n ** (-1.0 / (4 + sample.d))
    return BandwidthVector.from_array(factor * sample.scales())


def search_bounds(sample: DensitySample, opt: OptimizerConfig) -> Tuple[np.ndarray, np.ndarray]:
    scales = sample.scales()
    return opt.lower_multiplier * scales, opt.upper_multiplier * scales


def select_bandwidths(sample: DensitySample, spec: KernelSpec, opt: Optional[OptimizerConfig] = None) -> DensityModel:
    """
    Minimise the cross-validation criterion over ``(h_v, h_1, ..., h_d)``.

    Parameters
    ----------
    sample : DensitySample
        Training data with ``n >= 10`` and ``1 <= d <= 8``.
    spec : KernelSpec
        Kernel order used inside the criterion.
    opt : OptimizerConfig, optional
        Search settings; defaults apply when None.

    Returns
    -------
    DensityModel
        The best model over all restarts, with bandwidths clipped to the
        search bounds and ``smoothed_out`` flags set for conditioning
        variables at the upper bound.

    Raises
    ------
    DataError
        If the sample is too small or has too many conditioning variables.
    OptimizerError
        If no restart reached a finite criterion value.
    """
    opt = opt or OptimizerConfig()
    if sample.n < 10:
        raise DataError(f"bandwidth selection needs n >= 10 (got {sample.n})")
    if not 1 <= sample.d <= 8:
        raise DataError(f"bandwidth selection supports 1 <= d <= 8 (got {sample.d})")

    lower, upper = search_bounds(sample, opt)
    log_lower, log_upper = np.log(lower), np.log(upper)
    h_rot = rule_of_thumb_bandwidths(sample).as_array()
    max_evals = opt.max_evals_per_dim * (sample.d + 1)

    @handle_exceptions(default_return_value=np.inf, log_exception=False)
    def objective(log_h: np.ndarray) -> float:
        h = np.exp(np.clip(log_h, log_lower, log_upper))
        value = cv_criterion(sample, BandwidthVector.from_array(h), spec)
        return value if np.isfinite(value) else np.inf

    diagnostics = SearchDiagnostics()
    best: Optional[RestartResult] = None
    for multiplier in opt.start_multipliers[: opt.restarts]:
        start = np.clip(np.log(multiplier * h_rot), log_lower, log_upper)
        result = minimize(
            objective,
            start,
            method="Nelder-Mead",
            bounds=list(zip(log_lower, log_upper)),
            options={"maxfev": max_evals, "fatol": opt.fatol, "xatol": opt.xatol},
        )
        restart = RestartResult(
            start=np.exp(start),
            h=np.exp(np.clip(result.x, log_lower, log_upper)),
            value=float(result.fun),
            evaluations=int(result.nfev),
            message=str(result.message),
        )
        diagnostics.restarts.append(restart)
        logger.info(
            "Bandwidth restart x%.2f: CV=%.6g after %d evaluations, h=%s",
            multiplier,
            restart.value,
            restart.evaluations,
            np.round(restart.h, 5).tolist(),
        )
        # strict comparison keeps the earliest restart on ties
        if np.isfinite(restart.value) and (best is None or restart.value < best.value):
            best = restart

    if best is None:
        raise OptimizerError(f"no finite cross-validation value within budget: {diagnostics.summary()}")

    smoothed = tuple(bool(h >= SMOOTHED_OUT_FACTOR * u) for h, u in zip(best.h[1:], upper[1:]))
    if any(smoothed):
        names = sample.names or tuple(f"z{l}" for l in range(sample.d))
        logger.info("Smoothed out: %s", [name for name, flag in zip(names, smoothed) if flag])
    return DensityModel(
        kernel=spec,
        bandwidths=BandwidthVector.from_array(best.h),
        sample=sample,
        cv_value=best.value,
        smoothed_out=smoothed,
    )
