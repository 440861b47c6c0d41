"""
Data-generating processes of the six simulation designs.

Designs 1-3 are high-dimensional binary-choice models with exogenous
regressors, used for variable selection by SCAD-LS:

    Y = 1(V + b0 + b1 X1 + ... + bp Xp + e > 0),  b2 = b3 = 1, all others 0,
    V = X1 + X1 X2 + 1(X2 > 0) + e_v,  e_v ~ Logistic(0, 2).

Designs 4-6 have one endogenous regressor and many candidate instruments,
some of them invalid, used for moment selection by SCAD-GMM:

    Y = 1(V + b0 + b1 X + e > 0),  (b0, b1) = (0, 1),
    V = Z* + Z* Z1 + 1(Z1 > 0) + e_v.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from hdspecreg.common.exceptions import DataError
from hdspecreg.data import DataTable, Role, SeedSpec

logger = logging.getLogger(__name__)

VARIABLE_SELECTION_DESIGNS = (1, 2, 3)
MOMENT_SELECTION_DESIGNS = (4, 5, 6)
P_N_GRID = (15, 30, 50)
# (d_A, d_B) per p_n for designs 4-6
CANDIDATE_SPLITS = {15: (6, 7), 30: (14, 14), 50: (24, 24)}

LOGISTIC_SCALE = 2.0
DESIGN3_CORRELATION = 0.25
HETEROSKEDASTIC_SCALE = 1.8
CONSTANT_COLUMN = "const"
PROBIT_SCALE = math.sqrt(3.0) / math.pi


@dataclass(frozen=True)
class DesignSpec:
    """
    One cell of the simulation grid.

    Attributes
    ----------
    design : int
        Design id, 1 to 6.
    n : int
        Sample size.
    p_n : int
        Number of regressors including the intercept (designs 1-3) or of
        instruments including the constant (designs 4-6); one of 15, 30, 50.

    Raises
    ------
    DataError
        For a design or ``p_n`` outside the grid, or ``n < 2``.
    """

    design: int
    n: int
    p_n: int = 15

    def __post_init__(self) -> None:
        if self.design not in VARIABLE_SELECTION_DESIGNS + MOMENT_SELECTION_DESIGNS:
            raise DataError(f"design must be one of 1..6, got {self.design}")
        if self.p_n not in P_N_GRID:
            raise DataError(f"p_n must be one of {P_N_GRID}, got {self.p_n}")
        if self.n < 2:
            raise DataError(f"n_rows < 2 (got {self.n})")

    @property
    def is_moment_selection(self) -> bool:
        return self.design in MOMENT_SELECTION_DESIGNS

    @property
    def p(self) -> int:
        """Number of non-constant regressors in designs 1-3."""
        return self.p_n - 1

    @property
    def d_a(self) -> int:
        return CANDIDATE_SPLITS[self.p_n][0]

    @property
    def d_b(self) -> int:
        return CANDIDATE_SPLITS[self.p_n][1]

    def label(self) -> str:
        return f"design{self.design}_n{self.n}_p{self.p_n}"


@dataclass(frozen=True)
class DesignTruth:
    """
    Ground truth of one design draw, by column name.

    Attributes
    ----------
    beta : Dict[str, float]
        True coefficient per regressor, intercept under ``const``.
    regressors : Tuple[str, ...]
        Regressor names in estimation order, ``const`` first.
    support : Tuple[str, ...]
        Regressors with a non-zero coefficient.
    relevant_to_v : Tuple[str, ...]
        Conditioning columns ``V`` depends on.
    conditioning : Tuple[str, ...]
        Candidate conditioning columns for screening.
    known_valid : Tuple[str, ...]
        Known-valid instruments (designs 4-6).
    valid : Tuple[str, ...]
        Valid candidate instruments ``Z_A``.
    invalid : Tuple[str, ...]
        Invalid candidate instruments ``Z_B``.
    """

    beta: Dict[str, float]
    regressors: Tuple[str, ...]
    support: Tuple[str, ...]
    relevant_to_v: Tuple[str, ...]
    conditioning: Tuple[str, ...]
    known_valid: Tuple[str, ...] = ()
    valid: Tuple[str, ...] = ()
    invalid: Tuple[str, ...] = ()

    @property
    def candidates(self) -> Tuple[str, ...]:
        return self.valid + self.invalid

    def beta_vector(self) -> np.ndarray:
        return np.array([self.beta[name] for name in self.regressors])


def design_truth(spec: DesignSpec) -> DesignTruth:
    """
    Ground truth of a design; fixed for every draw.
    """
    if not spec.is_moment_selection:
        names = [f"x{j}" for j in range(1, spec.p + 1)]
        beta = {CONSTANT_COLUMN: 0.0, **{name: 0.0 for name in names}}
        beta["x2"] = beta["x3"] = 1.0
        return DesignTruth(
            beta=beta,
            regressors=(CONSTANT_COLUMN, *names),
            support=("x2", "x3"),
            relevant_to_v=("x1", "x2"),
            conditioning=tuple(names),
        )
    z_names = [f"z{j}" for j in range(1, spec.d_a + spec.d_b + 1)]
    return DesignTruth(
        beta={CONSTANT_COLUMN: 0.0, "x": 1.0},
        regressors=(CONSTANT_COLUMN, "x"),
        support=("x",),
        relevant_to_v=("z_star", "z1"),
        conditioning=("z_star", *z_names),
        known_valid=(CONSTANT_COLUMN, "z_star"),
        valid=tuple(z_names[: spec.d_a]),
        invalid=tuple(z_names[spec.d_a :]),
    )


def _logistic(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.logistic(loc=0.0, scale=LOGISTIC_SCALE, size=size)


def _variable_selection_draw(spec: DesignSpec, rng: np.random.Generator) -> Tuple[DataTable, DesignTruth]:
    n, p = spec.n, spec.p
    if spec.design == 3:
        cov = np.full((p, p), DESIGN3_CORRELATION)
        np.fill_diagonal(cov, 1.0)
        x = rng.multivariate_normal(np.zeros(p), cov, size=n, method="cholesky")
    else:
        x = rng.standard_normal((n, p))
    e_v = _logistic(rng, n)
    if spec.design == 1:
        eps = rng.normal(0.0, math.pi / math.sqrt(3.0), size=n)
    else:
        eps = rng.standard_normal(n) * np.exp(np.abs(x[:, 2]) / HETEROSKEDASTIC_SCALE)

    v = x[:, 0] + x[:, 0] * x[:, 1] + (x[:, 1] > 0) + e_v
    truth = design_truth(spec)
    names = list(truth.conditioning)
    index = sum(truth.beta[name] * x[:, j] for j, name in enumerate(names)) + truth.beta[CONSTANT_COLUMN]
    y = (v + index + eps > 0).astype(np.float64)

    columns = {"y": y, "v": v, **{name: x[:, j] for j, name in enumerate(names)}}
    roles = {"y": Role.OUTCOME, "v": Role.SPECIAL_REGRESSOR, **{name: Role.REGRESSOR for name in names}}
    return DataTable(columns, roles), truth


def _moment_selection_draw(spec: DesignSpec, rng: np.random.Generator) -> Tuple[DataTable, DesignTruth]:
    n, d_a, d_b = spec.n, spec.d_a, spec.d_b
    e = rng.standard_normal((n, 4))
    u = rng.standard_normal((n, d_a + d_b + 1))
    e_v = _logistic(rng, n)
    half_root3 = math.sqrt(3.0) / 2.0

    x = (e[:, 0] + e[:, 1] + e[:, 2]) / math.sqrt(3.0)
    eps = (e[:, 0] + e[:, 3]) / math.sqrt(2.0)
    z_star = (e[:, 1] + u[:, 0]) / math.sqrt(2.0)
    # z[:, j - 1] holds Z_j, built from u_{j+1} = u[:, j]
    z = np.empty((n, d_a + d_b))
    z[:, 0] = (e[:, 1] + u[:, 1]) / math.sqrt(2.0)
    a_source = e[:, 2] if spec.design == 4 else e[:, 1]
    for j in range(2, d_a + 1):
        z[:, j - 1] = 0.5 * a_source + half_root3 * u[:, j]
    for j in range(d_a + 1, d_a + d_b + 1):
        if spec.design == 6:
            z[:, j - 1] = (e[:, 0] + u[:, j]) / math.sqrt(2.0)
        else:
            z[:, j - 1] = 0.5 * e[:, 0] + half_root3 * u[:, j]

    v = z_star + z_star * z[:, 0] + (z[:, 0] > 0) + e_v
    truth = design_truth(spec)
    y = (v + truth.beta[CONSTANT_COLUMN] + truth.beta["x"] * x + eps > 0).astype(np.float64)

    z_names = list(truth.candidates)
    columns = {"y": y, "v": v, "x": x, CONSTANT_COLUMN: np.ones(n), "z_star": z_star}
    columns.update({name: z[:, j] for j, name in enumerate(z_names)})
    roles = {"y": Role.OUTCOME, "v": Role.SPECIAL_REGRESSOR, "x": Role.REGRESSOR, "z_star": Role.INSTRUMENT}
    roles.update({name: Role.INSTRUMENT for name in z_names})
    return DataTable(columns, roles), truth


def gen_design(spec: DesignSpec, seed: SeedSpec) -> Tuple[DataTable, DesignTruth]:
    """
    Draw one sample of a design.

    Parameters
    ----------
    spec : DesignSpec
        Design, sample size and dimension.
    seed : SeedSpec
        Random stream; the same stream always yields the same table.

    Returns
    -------
    Tuple[DataTable, DesignTruth]
        The sample, with ``y``, ``v`` and regressor (and instrument) columns
        tagged, and its ground truth.

    Examples
    --------
    .. code-block:: python

        table, truth = gen_design(DesignSpec(design=1, n=500), SeedSpec(7, stream_id=0))
        truth.support  # ('x2', 'x3')
    """
    rng = seed.generator()
    if spec.is_moment_selection:
        table, truth = _moment_selection_draw(spec, rng)
    else:
        table, truth = _variable_selection_draw(spec, rng)
    logger.debug("Drew %s from stream %s: %r", spec.label(), seed, table)
    return table, truth


def design_regressor_matrix(table: DataTable, truth: DesignTruth) -> np.ndarray:
    """
    Regressor matrix in ``truth.regressors`` order, with a column of ones for
    ``const`` when the table does not carry one.
    """
    cols: List[np.ndarray] = []
    for name in truth.regressors:
        cols.append(np.ones(table.n_rows) if name == CONSTANT_COLUMN and name not in table else table.column(name))
    return np.column_stack(cols)
