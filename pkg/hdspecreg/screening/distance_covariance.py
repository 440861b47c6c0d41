"""
Sample distance covariance and the scale-free screening statistic.

For a pair of samples ``v`` and ``z`` with pairwise distance matrices
``A[j, k] = |v_j - v_k|`` and ``B[j, k] = |z_j - z_k|``:

* ``S_n1 = n^-2 sum_{j,k} A_jk B_jk``
* ``S_n2 = S_n21 * S_n22`` with ``S_n21 = mean(A)``, ``S_n22 = mean(B)``
* ``S_n3 = n^-3 sum_j (sum_k A_jk)(sum_m B_jm)``
* ``V_n^2 = S_n1 + S_n2 - 2 S_n3``

``S_n3`` is obtained from row sums, so each pair costs O(n^2).
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from hdspecreg.common.exceptions import DataError

logger = logging.getLogger(__name__)

# vn2 slightly below zero by this much (relative to max(1, s_n1)) is rounding
VN2_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DcovParts:
    """
    The sums making up the sample distance covariance of one pair.
    """

    s_n1: float
    s_n2: float
    s_n3: float
    s_n21: float
    s_n22: float
    vn2: float


def _as_sample(x: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(arr)):
        raise DataError(f"non-finite value in {name}")
    return arr


def distance_matrix(x: np.ndarray) -> np.ndarray:
    """
    Pairwise absolute differences ``|x_j - x_k|`` as an ``n x n`` array.
    """
    return squareform(pdist(np.asarray(x, dtype=np.float64).reshape(-1, 1), metric="cityblock"))


def _check_pair(v: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    v = _as_sample(v, "v")
    z = _as_sample(z, "z")
    if v.shape[0] != z.shape[0]:
        raise DataError(f"length mismatch: len(v)={v.shape[0]}, len(z)={z.shape[0]}")
    if v.shape[0] < 2:
        raise DataError(f"n < 2 (got {v.shape[0]})")
    return v, z


def parts_from_distances(a: np.ndarray, b: np.ndarray) -> DcovParts:
    """
    Compute :class:`DcovParts` from two precomputed distance matrices.

    Parameters
    ----------
    a, b : np.ndarray
        Symmetric ``n x n`` distance matrices of the two samples.

    Returns
    -------
    DcovParts
        All sums; a ``vn2`` within rounding of zero is reported as 0.
    """
    n = a.shape[0]
    s_n1 = float(np.sum(a * b)) / n**2
    s_n21 = float(np.sum(a)) / n**2
    s_n22 = float(np.sum(b)) / n**2
    s_n2 = s_n21 * s_n22
    s_n3 = float(a.sum(axis=1) @ b.sum(axis=1)) / n**3
    vn2 = s_n1 + s_n2 - 2.0 * s_n3
    if vn2 < 0.0:
        if vn2 < -VN2_TOLERANCE * max(1.0, s_n1):
            logger.warning("Distance covariance %.3e is negative beyond rounding.", vn2)
        vn2 = 0.0
    return DcovParts(s_n1=s_n1, s_n2=s_n2, s_n3=s_n3, s_n21=s_n21, s_n22=s_n22, vn2=vn2)


def dcov_parts(v: np.ndarray, z: np.ndarray) -> DcovParts:
    """
    Sample distance covariance parts of ``(v, z)``.

    Parameters
    ----------
    v, z : array_like
        Finite samples of equal length ``n >= 2``.

    Returns
    -------
    DcovParts
        ``s_n1``, ``s_n2``, ``s_n3``, the marginal means and ``vn2``.

    Raises
    ------
    DataError
        On length mismatch, ``n < 2`` or non-finite input.

    Examples
    --------
    .. code-block:: python

        parts = dcov_parts([1.0, 2.0], [1.0, 2.0])
        # s_n1=0.5, s_n2=0.25, s_n3=0.25, vn2=0.25
    """
    v, z = _check_pair(v, z)
    return parts_from_distances(distance_matrix(v), distance_matrix(z))


def stat_from_parts(parts: DcovParts, n: int) -> float:
    if parts.s_n2 == 0.0:
        return 0.0
    return float(np.sqrt(n) * parts.vn2 / parts.s_n2)


def dc_stat(v: np.ndarray, z: np.ndarray) -> float:
    """
    Screening statistic ``sqrt(n) * V_n^2 / S_n2``.

    The ratio is invariant to affine rescaling of either sample. A constant
    sample gives ``S_n2 = 0`` and the statistic is 0.

    Parameters
    ----------
    v, z : array_like
        Finite samples of equal length ``n >= 2``.

    Returns
    -------
    float
        The statistic.
    """
    v, z = _check_pair(v, z)
    return stat_from_parts(dcov_parts(v, z), v.shape[0])
