"""
SCAD penalty, its derivative and the one-dimensional thresholding rule.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from hdspecreg.common.exceptions import DataError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# |b| below this is reported as an exact zero
ZERO_THRESHOLD = 1e-10


@dataclass(frozen=True)
class ScadParams:
    """
    Tuning pair of the SCAD penalty.

    Attributes
    ----------
    lam : float
        Penalty level, ``> 0``.
    a : float
        Concavity parameter, ``> 2``.
    """

    lam: float
    a: float = 3.7

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise DataError(f"lambda must be positive, got {self.lam}")
        if not (np.isfinite(self.a) and self.a > 2):
            raise DataError(f"a must exceed 2, got {self.a}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "a", float(self.a))


def scad_penalty(b: ArrayLike, p: ScadParams) -> ArrayLike:
    """
    Evaluate ``J_lambda(|b|)`` elementwise.

    Three branches: ``lambda |b|`` below ``lambda``; a quadratic spline up to
    ``a lambda``; the constant ``(a + 1) lambda^2 / 2`` beyond. The function is
    continuous at both knots.

    Parameters
    ----------
    b : float or np.ndarray
        Coefficients.
    p : ScadParams
        Tuning pair.

    Returns
    -------
    float or np.ndarray
        Penalty values.
    """
    lam, a = p.lam, p.a
    x = np.abs(np.asarray(b, dtype=np.float64))
    out = np.where(
        x < lam,
        lam * x,
        np.where(
            x < a * lam,
            (a * lam * (x - lam) - (x * x - lam * lam) / 2.0) / (a - 1.0) + lam * lam,
            (a - 1.0) * lam * lam / 2.0 + lam * lam,
        ),
    )
    return float(out) if out.ndim == 0 else out


def scad_deriv(b: ArrayLike, p: ScadParams) -> ArrayLike:
    """
    Derivative of the penalty in ``|b|``, for ``b >= 0``.

    Raises
    ------
    DataError
        If any ``b`` is negative.
    """
    lam, a = p.lam, p.a
    x = np.asarray(b, dtype=np.float64)
    if np.any(x < 0):
        raise DataError("scad_deriv expects non-negative arguments")
    out = np.where(x < lam, lam, np.where(x < a * lam, (a * lam - x) / (a - 1.0), 0.0))
    return float(out) if out.ndim == 0 else out


def soft_threshold(z: ArrayLike, w: ArrayLike) -> ArrayLike:
    return np.sign(z) * np.maximum(np.abs(z) - w, 0.0)


def scad_threshold(z: ArrayLike, p: ScadParams) -> ArrayLike:
    """
    Minimiser of ``(b - z)^2 / 2 + J_lambda(|b|)``.

    Soft thresholding up to ``2 lambda``, a linear interpolation between
    ``2 lambda`` and ``a lambda``, identity beyond.
    """
    lam, a = p.lam, p.a
    z = np.asarray(z, dtype=np.float64)
    x = np.abs(z)
    out = np.where(
        x <= 2.0 * lam,
        soft_threshold(z, lam),
        np.where(x <= a * lam, ((a - 1.0) * z - np.sign(z) * a * lam) / (a - 2.0), z),
    )
    return float(out) if out.ndim == 0 else out


def exact_zeros(b: np.ndarray) -> np.ndarray:
    b = np.array(b, dtype=np.float64)
    b[np.abs(b) < ZERO_THRESHOLD] = 0.0
    return b
