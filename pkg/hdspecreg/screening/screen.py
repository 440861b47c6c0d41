"""
Marginal screening of conditioning variables by the distance-covariance
statistic, and TPR/FDR evaluation against a known relevant set.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hdspecreg.common.exceptions import DataError
from hdspecreg.screening.distance_covariance import _as_sample, distance_matrix, parts_from_distances, stat_from_parts

logger = logging.getLogger(__name__)

TOP_K = "top_k"
THRESHOLD = "threshold"


@dataclass(frozen=True)
class ScreenRule:
    """
    How the selected set is formed: ``kind`` is ``"top_k"`` (``value`` = p~)
    or ``"threshold"`` (``value`` = the cut-off ``c (log n)^{3/4}``).
    """

    kind: str
    value: float


@dataclass(frozen=True)
class ScreenReport:
    """
    Result of one screening pass.

    Attributes
    ----------
    stats : Tuple[Tuple[int, float], ...]
        ``(column index, t_hat)`` sorted by decreasing ``t_hat``, ties by
        increasing index.
    selected : FrozenSet[int]
        Indices retained by the rule.
    rule : ScreenRule
        The rule that produced ``selected``.
    n : int
        Sample size.
    names : Tuple[str, ...]
        Optional column names, aligned with the column indices.
    degenerate : FrozenSet[int]
        Constant columns; never selected.
    """

    stats: Tuple[Tuple[int, float], ...]
    selected: FrozenSet[int]
    rule: ScreenRule
    n: int
    names: Tuple[str, ...] = ()
    degenerate: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def p_n(self) -> int:
        return len(self.stats)

    def selected_sorted(self) -> List[int]:
        return sorted(self.selected)

    def selected_names(self) -> List[str]:
        if not self.names:
            raise DataError("screen report carries no column names")
        return [self.names[j] for j in self.selected_sorted()]

    def t_hat(self) -> np.ndarray:
        """
        Statistics in column order.
        """
        out = np.zeros(self.p_n)
        for index, value in self.stats:
            out[index] = value
        return out

    def to_records(self) -> List[Dict[str, Any]]:
        """
        One row per column in rank order, for the ``screen.csv`` report.
        """
        records = []
        for rank, (index, value) in enumerate(self.stats, start=1):
            records.append(
                {
                    "rank": rank,
                    "index": index,
                    "name": self.names[index] if self.names else "",
                    "t_hat": value,
                    "selected": index in self.selected,
                }
            )
        return records


def _column_stats(v: np.ndarray, Z: np.ndarray) -> Tuple[np.ndarray, FrozenSet[int]]:
    v = _as_sample(v, "v")
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    if Z.ndim != 2 or Z.shape[0] != v.shape[0]:
        raise DataError(f"dimension mismatch: v has {v.shape[0]} rows, Z has shape {Z.shape}")
    if v.shape[0] < 2:
        raise DataError(f"n < 2 (got {v.shape[0]})")
    if not np.all(np.isfinite(Z)):
        raise DataError("non-finite value in Z")

    n = v.shape[0]
    a = distance_matrix(v)
    t_hat = np.empty(Z.shape[1])
    degenerate = set()
    for j in range(Z.shape[1]):
        parts = parts_from_distances(a, distance_matrix(Z[:, j]))
        t_hat[j] = stat_from_parts(parts, n)
        if parts.s_n2 == 0.0:
            degenerate.add(j)
    return t_hat, frozenset(degenerate)


def _ranking(t_hat: np.ndarray) -> Tuple[Tuple[int, float], ...]:
    # lexsort keys are read last-first: descending t_hat, then ascending index
    order = np.lexsort((np.arange(t_hat.shape[0]), -t_hat))
    return tuple((int(j), float(t_hat[j])) for j in order)


def screen_topk(v: np.ndarray, Z: np.ndarray, p_tilde: int, names: Sequence[str] = ()) -> ScreenReport:
    """
    Keep the ``p_tilde`` columns of ``Z`` with the largest statistic.

    Parameters
    ----------
    v : array_like
        Special regressor, length n.
    Z : array_like
        Candidate conditioning variables, ``n x p_n``.
    p_tilde : int
        Number of columns to retain (at least 1).
    names : Sequence[str], optional
        Column names carried into the report.

    Returns
    -------
    ScreenReport
        ``min(p_tilde, p_n)`` selected indices; ties go to the lower index.
        Constant columns are ranked with statistic 0 but never selected.

    Raises
    ------
    DataError
        If ``p_tilde < 1`` or the dimensions do not match.
    """
    if p_tilde < 1:
        raise DataError(f"p_tilde must be >= 1, got {p_tilde}")
    t_hat, degenerate = _column_stats(v, Z)
    stats = _ranking(t_hat)
    selected = frozenset(j for j, _ in stats[: min(p_tilde, len(stats))] if j not in degenerate)
    report = ScreenReport(stats, selected, ScreenRule(TOP_K, p_tilde), len(np.ravel(v)), tuple(names), degenerate)
    logger.debug("Screening ranking (top %d): %s", p_tilde, stats)
    return report


def threshold_value(c: float, n: int) -> float:
    return c * math.log(n) ** 0.75


def screen_threshold(v: np.ndarray, Z: np.ndarray, c: float = 1.0, names: Sequence[str] = ()) -> ScreenReport:
    """
    Keep every column whose statistic reaches ``c * (log n)^{3/4}``.

    Parameters
    ----------
    v, Z : array_like
        As in :func:`screen_topk`; requires ``n >= 3``.
    c : float, optional
        Positive threshold constant, by default 1.0.
    names : Sequence[str], optional
        Column names carried into the report.

    Returns
    -------
    ScreenReport
        The thresholded selection.
    """
    if not c > 0:
        raise DataError(f"threshold constant must be positive, got {c}")
    n = len(np.ravel(v))
    if n < 3:
        raise DataError(f"threshold screening needs n >= 3 (got {n})")
    t_hat, degenerate = _column_stats(v, Z)
    cut = threshold_value(c, n)
    stats = _ranking(t_hat)
    selected = frozenset(j for j, value in stats if value >= cut and j not in degenerate)
    logger.debug("Screening threshold %.4f selected %s", cut, sorted(selected))
    return ScreenReport(stats, selected, ScreenRule(THRESHOLD, cut), n, tuple(names), degenerate)


def tpr_fdr(selected: Iterable[int], truth: Iterable[int], p_n: int) -> Tuple[float, float]:
    """
    True positive rate and false discovery rate of a selection.

    ``TPR = |S & T| / |T|`` (1 when ``T`` is empty) and
    ``FDR = |S - T| / (|S| + 1)``.

    Parameters
    ----------
    selected, truth : Iterable[int]
        Index sets within ``[0, p_n)``.
    p_n : int
        Number of candidate columns.

    Returns
    -------
    Tuple[float, float]
        ``(tpr, fdr)``.

    Raises
    ------
    DataError
        If an index falls outside ``[0, p_n)``.
    """
    sel = set(int(j) for j in selected)
    tru = set(int(j) for j in truth)
    out_of_range = sorted(j for j in sel | tru if not 0 <= j < p_n)
    if out_of_range:
        raise DataError(f"index out of range [0, {p_n}): {out_of_range}")
    tpr = len(sel & tru) / len(tru) if tru else 1.0
    fdr = len(sel - tru) / (len(sel) + 1)
    return tpr, fdr


def names_to_indices(names: Sequence[str], wanted: Optional[Iterable[str]]) -> List[int]:
    lookup = {name: j for j, name in enumerate(names)}
    return [lookup[w] for w in (wanted or ()) if w in lookup]
