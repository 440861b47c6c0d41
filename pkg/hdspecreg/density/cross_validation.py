"""
Least-squares cross-validation criterion for conditional densities.

For bandwidths ``h`` the criterion is ``CV(h) = I_n1 - 2 I_n2`` with

* ``I_n1 = n^-1 sum_i G_{-i}(z_i) / f_{-i}(z_i)^2``
* ``I_n2 = n^-1 sum_i f_{-i}(v_i, z_i) / f_{-i}(z_i)``

where ``G(z) = int f(v, z)^2 dv`` and every ``-i`` estimate leaves observation
``i`` out of all of its sums. The integral over ``v`` uses the kernel's
closed-form self-convolution. The ``(n - 1)`` normalisations cancel in both
ratios and are omitted.
"""

import logging
from dataclasses import dataclass

import numpy as np

from hdspecreg.common.exceptions import DataError, DegenerateDensityError
from hdspecreg.density.density_model import BandwidthVector, DensitySample
from hdspecreg.density.kernels import KernelSpec

logger = logging.getLogger(__name__)

_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class LeaveOneOutTerms:
    """
    Per-observation leave-one-out quantities, each up to a common ``n - 1``
    power.

    Attributes
    ----------
    g : np.ndarray
        ``sum_{j,k != i} p_ij p_ik C_jk``, proportional to ``G_{-i}(z_i)``.
    f_z : np.ndarray
        ``sum_{j != i} p_ij``, proportional to ``f_{-i}(z_i)``.
    f_vz : np.ndarray
        ``sum_{j != i} p_ij Kv_ij``, proportional to ``f_{-i}(v_i, z_i)``.
    """

    g: np.ndarray
    f_z: np.ndarray
    f_vz: np.ndarray

    @property
    def i_n1(self) -> float:
        return float(np.mean(self.g / self.f_z**2))

    @property
    def i_n2(self) -> float:
        return float(np.mean(self.f_vz / self.f_z))


def leave_one_out_terms(sample: DensitySample, h: BandwidthVector, spec: KernelSpec) -> LeaveOneOutTerms:
    """
    Build the leave-one-out sums behind the criterion.

    Parameters
    ----------
    sample : DensitySample
        Training data with ``n >= 3``.
    h : BandwidthVector
        Bandwidths; ``h.d`` must equal ``sample.d``.
    spec : KernelSpec
        Kernel used in every coordinate.

    Returns
    -------
    LeaveOneOutTerms
        The three per-observation sums.

    Raises
    ------
    DataError
        If ``n < 3`` or the bandwidth dimension does not match.
    DegenerateDensityError
        If some ``f_{-i}(z_i)`` is so small that its square underflows.
    """
    if sample.n < 3:
        raise DataError(f"cross-validation needs n >= 3 (got {sample.n})")
    if h.d != sample.d:
        raise DataError(f"dimension mismatch: {h.d} z-bandwidths for d={sample.d}")

    kernel = spec.kernel()
    p = np.ones((sample.n, sample.n))
    for l, h_l in enumerate(h.h_z):
        col = sample.z[:, l]
        p *= kernel.scaled(col[:, None] - col[None, :], h_l)
    np.fill_diagonal(p, 0.0)

    dv = sample.v[:, None] - sample.v[None, :]
    kv = kernel.scaled(dv, h.h_v)
    cv = kernel.selfconv(dv / h.h_v) / h.h_v

    f_z = p.sum(axis=1)
    # f_z enters squared; its square must stay a normal float
    degenerate = ~np.isfinite(f_z) | (f_z**2 <= _TINY)
    if np.any(degenerate):
        bad = int(np.flatnonzero(degenerate)[0])
        raise DegenerateDensityError(f"degenerate denominator: leave-one-out f(z) is {f_z[bad]:.3g} at observation {bad}")

    f_vz = np.einsum("ij,ij->i", p, kv)
    # O(n^3) through one matrix product
    g = np.einsum("ij,ij->i", p @ cv, p)
    return LeaveOneOutTerms(g=g, f_z=f_z, f_vz=f_vz)


def cv_criterion(sample: DensitySample, h: BandwidthVector, spec: KernelSpec) -> float:
    """
    Cross-validation criterion ``I_n1 - 2 I_n2``.

    Parameters
    ----------
    sample : DensitySample
        Training data.
    h : BandwidthVector
        Candidate bandwidths.
    spec : KernelSpec
        Kernel order.

    Returns
    -------
    float
        The criterion value; smaller is better.
    """
    terms = leave_one_out_terms(sample, h, spec)
    return terms.i_n1 - 2.0 * terms.i_n2
