"""
Product-kernel joint, marginal and conditional density estimates.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from hdspecreg.common.exceptions import DataError
from hdspecreg.density.kernels import KernelSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensitySample:
    """
    Training data for a conditional density of ``v`` given ``z``.

    Attributes
    ----------
    v : np.ndarray
        Length-n special regressor.
    z : np.ndarray
        ``n x d`` conditioning variables.
    names : Tuple[str, ...]
        Optional names of the conditioning columns.
    """

    v: np.ndarray
    z: np.ndarray
    names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=np.float64).ravel()
        z = np.array(self.z, dtype=np.float64)
        if z.ndim == 1:
            z = z.reshape(-1, 1)
        if z.ndim != 2 or z.shape[0] != v.shape[0]:
            raise DataError(f"dimension mismatch: v has {v.shape[0]} rows, z has shape {z.shape}")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(z))):
            raise DataError("non-finite value in density sample")
        if self.names and len(self.names) != z.shape[1]:
            raise DataError(f"{len(self.names)} names for {z.shape[1]} conditioning columns")
        v.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def d(self) -> int:
        return self.z.shape[1]

    def scales(self) -> np.ndarray:
        """
        Sample standard deviations of ``(v, z_1, ..., z_d)``.

        Raises
        ------
        DataError
            If any column is constant.
        """
        sd = np.concatenate(([np.std(self.v, ddof=1)], np.std(self.z, axis=0, ddof=1)))
        if np.any(sd <= 0):
            raise DataError("constant column in density sample")
        return sd


@dataclass(frozen=True)
class BandwidthVector:
    """
    Bandwidth ``h_v`` for the special regressor and ``h_z`` for each
    conditioning variable.
    """

    h_v: float
    h_z: Tuple[float, ...]

    def __post_init__(self) -> None:
        h_z = tuple(float(h) for h in np.ravel(self.h_z))
        values = np.array((float(self.h_v),) + h_z)
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DataError(f"bandwidths must be positive and finite, got {values.tolist()}")
        object.__setattr__(self, "h_v", float(self.h_v))
        object.__setattr__(self, "h_z", h_z)

    @classmethod
    def from_array(cls, h: Sequence[float]) -> "BandwidthVector":
        h = np.asarray(h, dtype=np.float64).ravel()
        return cls(float(h[0]), tuple(h[1:]))

    def as_array(self) -> np.ndarray:
        return np.array((self.h_v,) + self.h_z)

    @property
    def d(self) -> int:
        return len(self.h_z)


def _points(z: Union[float, Sequence[float], np.ndarray], d: int) -> np.ndarray:
    pts = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if pts.ndim == 1:
        if d == 1 and pts.shape[0] != 1:
            pts = pts.reshape(-1, 1)
        else:
            pts = pts.reshape(1, -1)
    if pts.shape[1] != d:
        raise DataError(f"dimension mismatch: model has d={d}, got points of width {pts.shape[1]}")
    return pts


@dataclass(frozen=True)
class DensityModel:
    """
    A fitted product-kernel density of ``(v, z)``.

    Attributes
    ----------
    kernel : KernelSpec
        Kernel order used for evaluation.
    bandwidths : BandwidthVector
        Bandwidths, one per coordinate.
    sample : DensitySample
        Training data (immutable).
    cv_value : float
        Cross-validation criterion at ``bandwidths`` (nan when not fitted by
        cross-validation).
    smoothed_out : Tuple[bool, ...]
        Per conditioning variable, whether its bandwidth sits at the upper
        search bound.

    Examples
    --------
    .. code-block:: python

        model = select_bandwidths(sample, KernelSpec(2), OptimizerConfig())
        f = model.cond_density(v=0.3, z=[0.0, 1.2])
        f_all = model.cond_density_at(sample.v, sample.z)
    """

    kernel: KernelSpec
    bandwidths: BandwidthVector
    sample: DensitySample
    cv_value: float = float("nan")
    smoothed_out: Tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.bandwidths.d != self.sample.d:
            raise DataError(f"{self.bandwidths.d} z-bandwidths for d={self.sample.d}")
        if not self.smoothed_out:
            object.__setattr__(self, "smoothed_out", (False,) * self.sample.d)

    def _z_weights(self, z_points: np.ndarray) -> np.ndarray:
        # (m, n) products of z-kernels between evaluation and training points
        k = self.kernel.kernel()
        weights = np.ones((z_points.shape[0], self.sample.n))
        for l, h in enumerate(self.bandwidths.h_z):
            weights *= k.scaled(z_points[:, l][:, None] - self.sample.z[:, l][None, :], h)
        return weights

    def _v_weights(self, v_points: np.ndarray) -> np.ndarray:
        k = self.kernel.kernel()
        return k.scaled(v_points[:, None] - self.sample.v[None, :], self.bandwidths.h_v)

    def marginal_density_at(self, z: np.ndarray) -> np.ndarray:
        pts = _points(z, self.sample.d)
        return self._z_weights(pts).mean(axis=1)

    def joint_density_at(self, v: np.ndarray, z: np.ndarray) -> np.ndarray:
        pts = _points(z, self.sample.d)
        v_pts = np.atleast_1d(np.asarray(v, dtype=np.float64)).ravel()
        if v_pts.shape[0] != pts.shape[0]:
            raise DataError(f"{v_pts.shape[0]} v values for {pts.shape[0]} z points")
        return (self._z_weights(pts) * self._v_weights(v_pts)).mean(axis=1)

    def cond_density_at(self, v: np.ndarray, z: np.ndarray) -> np.ndarray:
        """
        Conditional density ``f(v_i | z_i)`` at paired points.

        Parameters
        ----------
        v : np.ndarray
            Length-m values of the special regressor.
        z : np.ndarray
            ``m x d`` conditioning points.

        Returns
        -------
        np.ndarray
            Raw ratios of joint to marginal estimates; may be negative with the
            fourth-order kernel.
        """
        pts = _points(z, self.sample.d)
        v_pts = np.atleast_1d(np.asarray(v, dtype=np.float64)).ravel()
        if v_pts.shape[0] != pts.shape[0]:
            raise DataError(f"{v_pts.shape[0]} v values for {pts.shape[0]} z points")
        wz = self._z_weights(pts)
        joint = (wz * self._v_weights(v_pts)).sum(axis=1)
        marginal = wz.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return joint / marginal

    def joint_density(self, v: float, z: Sequence[float]) -> float:
        return float(self.joint_density_at(np.array([v]), _points(z, self.sample.d))[0])

    def marginal_density(self, z: Sequence[float]) -> float:
        return float(self.marginal_density_at(_points(z, self.sample.d))[0])

    def cond_density(self, v: float, z: Sequence[float]) -> float:
        return float(self.cond_density_at(np.array([v]), _points(z, self.sample.d))[0])

    def with_kernel(self, spec: KernelSpec) -> "DensityModel":
        """
        Same bandwidths and data, evaluated with another kernel order.
        """
        return replace(self, kernel=spec)

    def report(self) -> Dict[str, Any]:
        """
        Plain dictionary of the fitted bandwidths for text reports.
        """
        names = self.sample.names or tuple(f"z{l}" for l in range(self.sample.d))
        return {
            "kernel_order": self.kernel.order,
            "n": self.sample.n,
            "cv_value": self.cv_value,
            "h_v": self.bandwidths.h_v,
            "h_z": {name: h for name, h in zip(names, self.bandwidths.h_z)},
            "smoothed_out": {name: flag for name, flag in zip(names, self.smoothed_out)},
        }
