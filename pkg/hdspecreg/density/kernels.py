"""
Gaussian-based kernels of order 2 and 4.

Each kernel provides its value ``K(u)`` and its self-convolution
``(K*K)(u) = int K(t) K(u - t) dt``, which turns the integral over ``v`` in
the cross-validation criterion into a closed form.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.stats import norm

from hdspecreg.common.exceptions import DataError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_SQRT2 = np.sqrt(2.0)


class Kernel(ABC):
    """
    Abstract symmetric kernel.

    Subclasses must implement the following:
    - order
    - __call__(u)
    - selfconv(u)
    """

    order: int

    @abstractmethod
    def __call__(self, u: ArrayLike) -> ArrayLike:
        """
        Evaluate the kernel elementwise.

        Parameters
        ----------
        u : float or np.ndarray
            Standardized distances.

        Returns
        -------
        float or np.ndarray
            Kernel values, same shape as ``u``.
        """
        pass

    @abstractmethod
    def selfconv(self, u: ArrayLike) -> ArrayLike:
        """
        Evaluate the self-convolution ``(K*K)(u)`` elementwise.
        """
        pass

    def scaled(self, x: np.ndarray, h: float) -> np.ndarray:
        """
        ``K_h(x) = K(x / h) / h``.
        """
        return self(np.asarray(x) / h) / h


class GaussianKernel(Kernel):
    """
    Standard normal density, a second-order kernel.
    """

    order = 2

    def __call__(self, u: ArrayLike) -> ArrayLike:
        return norm.pdf(u)

    def selfconv(self, u: ArrayLike) -> ArrayLike:
        # N(0, 1) * N(0, 1) = N(0, 2)
        return norm.pdf(np.asarray(u) / _SQRT2) / _SQRT2


class FourthOrderGaussianKernel(Kernel):
    """
    ``K(u) = (3 - u^2) phi(u) / 2``: integrates to one, first three moments
    vanish, fourth moment is -3. Takes negative values for ``|u| > sqrt(3)``.
    """

    order = 4

    def __call__(self, u: ArrayLike) -> ArrayLike:
        u = np.asarray(u, dtype=np.float64)
        return 0.5 * (3.0 - u * u) * norm.pdf(u)

    def selfconv(self, u: ArrayLike) -> ArrayLike:
        u = np.asarray(u, dtype=np.float64)
        u2 = u * u
        return norm.pdf(u / _SQRT2) / _SQRT2 * (108.0 - 28.0 * u2 + u2 * u2) / 64.0


@dataclass(frozen=True)
class KernelSpec:
    """
    Kernel order (2 or 4); the family is Gaussian in both cases.
    """

    order: int = 2

    def __post_init__(self) -> None:
        if self.order not in KERNELS:
            raise DataError(f"kernel order must be one of {sorted(KERNELS)}, got {self.order}")

    def kernel(self) -> Kernel:
        return KERNELS[self.order]


KERNELS = {2: GaussianKernel(), 4: FourthOrderGaussianKernel()}


def kernel_eval(spec: KernelSpec, u: ArrayLike) -> ArrayLike:
    """
    Kernel value at ``u``.

    Examples
    --------
    .. code-block:: python

        kernel_eval(KernelSpec(2), 0.0)  # 0.3989423
        kernel_eval(KernelSpec(4), 0.0)  # 0.5984134
    """
    return spec.kernel()(u)


def kernel_selfconv(spec: KernelSpec, u: ArrayLike) -> ArrayLike:
    """
    Closed-form self-convolution at ``u``.

    Examples
    --------
    .. code-block:: python

        kernel_selfconv(KernelSpec(2), 0.0)  # 1 / (2 sqrt(pi)) = 0.2820948
    """
    return spec.kernel().selfconv(u)
