"""
Special-regressor transform of a binary outcome.

For ``y = 1(v + x'b + e > 0)`` the transformed outcome

    y~ = (y - 1(v > 0)) / f(v | z)

satisfies ``E[z (y~ - x'b)] = 0`` for instruments ``z`` that are uncorrelated
with ``e``, which turns the binary-choice model into a linear moment problem.
The density ``f(v | z)`` is estimated after screening ``z`` down to a few
columns.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from hdspecreg.common.exceptions import DataError, DegenerateDensityError
from hdspecreg.data import DataTable, Role, SeedSpec
from hdspecreg.density import DensityModel, DensitySample, KernelSpec, OptimizerConfig, select_bandwidths
from hdspecreg.screening import ScreenReport, screen_topk

logger = logging.getLogger(__name__)

# above this share of non-positive density estimates the bandwidths are unusable
MAX_NONPOSITIVE_SHARE = 0.2

Y_TILDE_COLUMN = "y_tilde"


@dataclass(frozen=True)
class TransformConfig:
    """
    Settings of the screen, density and transform steps.

    Attributes
    ----------
    p_tilde : int
        Number of conditioning variables kept after screening.
    kernel_order : int
        Kernel order used to evaluate ``f(v | z)``.
    density_floor : float
        Lower clamp for the density in the denominator, in ``[0, 0.5)``.
    optimizer : OptimizerConfig
        Bandwidth search settings.
    seed : SeedSpec
        Stream recorded with the result.
    bandwidth_kernel_order : int, optional
        Kernel order used while selecting bandwidths; ``None`` means
        ``kernel_order``.
    conditioning : Tuple[str, ...]
        Candidate conditioning columns. Empty means every instrument column,
        or every regressor column when the table has no instruments.
    """

    p_tilde: int = 4
    kernel_order: int = 4
    density_floor: float = 0.01
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: SeedSpec = field(default_factory=lambda: SeedSpec(0))
    bandwidth_kernel_order: Optional[int] = 2
    conditioning: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.p_tilde < 1:
            raise DataError(f"p_tilde must be >= 1, got {self.p_tilde}")
        if not 0.0 <= self.density_floor < 0.5:
            raise DataError(f"density_floor must lie in [0, 0.5), got {self.density_floor}")
        KernelSpec(self.kernel_order)
        if self.bandwidth_kernel_order is not None:
            KernelSpec(self.bandwidth_kernel_order)
        object.__setattr__(self, "conditioning", tuple(self.conditioning))

    @property
    def search_kernel(self) -> KernelSpec:
        return KernelSpec(self.bandwidth_kernel_order or self.kernel_order)


@dataclass(frozen=True)
class TransformedData:
    """
    Output of :func:`transform`.

    Attributes
    ----------
    y_tilde : np.ndarray
        Transformed outcome, one finite value per observation.
    f_hat : np.ndarray
        Raw conditional density estimates before clamping.
    floor_hits : int
        Observations whose density was raised to the floor.
    data : DataTable
        The input table.
    density_model : DensityModel or None
        Fitted density; None when a known density was supplied.
    screen : ScreenReport or None
        Screening result; None when a known density was supplied.
    """

    y_tilde: np.ndarray
    f_hat: np.ndarray
    floor_hits: int
    data: DataTable
    density_model: Optional[DensityModel] = None
    screen: Optional[ScreenReport] = None

    def to_table(self) -> DataTable:
        return self.data.with_column(Y_TILDE_COLUMN, self.y_tilde, Role.OTHER)

    def report(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "n": self.data.n_rows,
            "floor_hits": self.floor_hits,
            "y_tilde_mean": float(np.mean(self.y_tilde)),
            "y_tilde_sd": float(np.std(self.y_tilde, ddof=1)),
        }
        if self.screen is not None:
            out["selected"] = ",".join(self.screen.selected_names())
        if self.density_model is not None:
            out["density"] = self.density_model.report()
        return out


def ytilde_one(y: float, v: float, fhat: float, floor: float) -> float:
    """
    Transform one observation: ``(y - 1(v > 0)) / max(fhat, floor)``.

    Parameters
    ----------
    y : {0, 1}
        Binary outcome.
    v : float
        Special regressor; ``v == 0`` counts as not positive.
    fhat : float
        Density estimate at the observation.
    floor : float
        Clamp for the denominator, ``>= 0``.

    Returns
    -------
    float
        0 whenever the numerator is 0, whatever ``fhat`` is.

    Raises
    ------
    DegenerateDensityError
        If the numerator is non-zero and the clamped density is not positive.

    Examples
    --------
    .. code-block:: python

        ytilde_one(1, -1.0, 0.5, 0.01)    # 2.0
        ytilde_one(1, -1.0, 0.004, 0.01)  # 100.0
    """
    numerator = float(y) - float(v > 0)
    if numerator == 0.0:
        return 0.0
    denominator = max(fhat, floor) if np.isfinite(fhat) else floor
    if denominator <= 0.0:
        raise DegenerateDensityError(f"degenerate density: max(fhat={fhat}, floor={floor}) <= 0")
    return numerator / denominator


def ytilde(y: np.ndarray, v: np.ndarray, fhat: np.ndarray, floor: float) -> Tuple[np.ndarray, int]:
    """
    Vectorised :func:`ytilde_one`.

    Returns
    -------
    Tuple[np.ndarray, int]
        Transformed outcomes and the number of clamped densities.
    """
    y = np.asarray(y, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    fhat = np.asarray(fhat, dtype=np.float64)
    numerator = y - (v > 0).astype(np.float64)
    clamped = ~np.isfinite(fhat) | (fhat < floor)
    denominator = np.where(clamped, floor, fhat)
    bad = (numerator != 0.0) & (denominator <= 0.0)
    if np.any(bad):
        raise DegenerateDensityError(
            f"degenerate density at {int(bad.sum())} observation(s), first at {int(np.flatnonzero(bad)[0])}"
        )
    out = np.zeros_like(numerator)
    nz = numerator != 0.0
    out[nz] = numerator[nz] / denominator[nz]
    return out, int(clamped.sum())


def conditioning_columns(data: DataTable, cfg: TransformConfig) -> List[str]:
    if cfg.conditioning:
        missing = [name for name in cfg.conditioning if name not in data]
        if missing:
            raise DataError(f"unknown conditioning column(s): {missing}")
        return list(cfg.conditioning)
    return data.names_with_role(Role.INSTRUMENT) or data.names_with_role(Role.REGRESSOR)


def transform(data: DataTable, cfg: TransformConfig) -> TransformedData:
    """
    Screen, fit ``f(v | z)`` and transform the outcome.

    1. Rank the conditioning columns by the distance-covariance statistic
       with ``v`` and keep the top ``p_tilde``.
    2. Select bandwidths on ``(v, kept columns)`` by cross-validation with the
       search kernel.
    3. Evaluate ``f(v_i | z_i)`` at every observation with the evaluation
       kernel.
    4. Apply :func:`ytilde` with the configured floor.

    Parameters
    ----------
    data : DataTable
        Table with outcome, special-regressor and conditioning columns.
    cfg : TransformConfig
        Settings.

    Returns
    -------
    TransformedData
        Transformed outcome with the fitted density and screen report.

    Raises
    ------
    DataError
        "insufficient sample" when ``n < p_tilde + 10``, or too few
        conditioning columns.
    DegenerateDensityError
        When the density is non-positive at more than 20% of observations.
    """
    if data.n_rows < cfg.p_tilde + 10:
        raise DataError(f"insufficient sample: n={data.n_rows} < p_tilde + 10 = {cfg.p_tilde + 10}")
    names = conditioning_columns(data, cfg)
    if len(names) < cfg.p_tilde:
        raise DataError(f"need at least p_tilde={cfg.p_tilde} conditioning columns, have {len(names)}")

    y, v = data.y, data.v
    z_all = data.matrix(names)
    screen = screen_topk(v, z_all, cfg.p_tilde, names=names)
    kept = screen.selected_sorted()
    if not kept:
        raise DataError("screening kept no non-constant conditioning column")
    logger.info("Conditioning on %s", [names[j] for j in kept])

    sample = DensitySample(v, z_all[:, kept], names=tuple(names[j] for j in kept))
    model = select_bandwidths(sample, cfg.search_kernel, cfg.optimizer)
    if model.kernel.order != cfg.kernel_order:
        model = model.with_kernel(KernelSpec(cfg.kernel_order))

    f_hat = model.cond_density_at(sample.v, sample.z)
    nonpositive = ~np.isfinite(f_hat) | (f_hat <= 0.0)
    if nonpositive.mean() > MAX_NONPOSITIVE_SHARE:
        raise DegenerateDensityError(
            f"conditional density is non-positive at {nonpositive.mean():.1%} of observations; check the bandwidth search"
        )

    y_tilde, floor_hits = ytilde(y, v, f_hat, cfg.density_floor)
    if floor_hits:
        logger.info("Density floor %.4g applied to %d of %d observations", cfg.density_floor, floor_hits, data.n_rows)
    return TransformedData(
        y_tilde=y_tilde, f_hat=f_hat, floor_hits=floor_hits, data=data, density_model=model, screen=screen
    )


def transform_with_density(data: DataTable, f_values: np.ndarray, floor: float = 0.0) -> TransformedData:
    """
    Transform the outcome with a known density ``f(v_i | z_i)``.

    Parameters
    ----------
    data : DataTable
        Table with outcome and special-regressor columns.
    f_values : np.ndarray
        Known density at each observation.
    floor : float, optional
        Clamp, by default 0 (no clamping of positive densities).

    Returns
    -------
    TransformedData
        Without density model or screen report.
    """
    f_values = np.asarray(f_values, dtype=np.float64).ravel()
    if f_values.shape[0] != data.n_rows:
        raise DataError(f"{f_values.shape[0]} density values for {data.n_rows} rows")
    y_tilde, floor_hits = ytilde(data.y, data.v, f_values, floor)
    return TransformedData(y_tilde=y_tilde, f_hat=f_values, floor_hits=floor_hits, data=data)
