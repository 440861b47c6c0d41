"""
Kernel density estimation of the special regressor given the conditioning
variables.
"""

from hdspecreg.density.bandwidth import OptimizerConfig, rule_of_thumb_bandwidths, select_bandwidths
from hdspecreg.density.cross_validation import LeaveOneOutTerms, cv_criterion, leave_one_out_terms
from hdspecreg.density.density_model import BandwidthVector, DensityModel, DensitySample
from hdspecreg.density.kernels import (
    FourthOrderGaussianKernel,
    GaussianKernel,
    Kernel,
    KernelSpec,
    kernel_eval,
    kernel_selfconv,
)

__all__ = [
    "OptimizerConfig",
    "rule_of_thumb_bandwidths",
    "select_bandwidths",
    "LeaveOneOutTerms",
    "cv_criterion",
    "leave_one_out_terms",
    "BandwidthVector",
    "DensityModel",
    "DensitySample",
    "FourthOrderGaussianKernel",
    "GaussianKernel",
    "Kernel",
    "KernelSpec",
    "kernel_eval",
    "kernel_selfconv",
]
