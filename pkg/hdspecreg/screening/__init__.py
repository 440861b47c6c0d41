"""
Distance-covariance screening.
"""

from hdspecreg.screening.distance_covariance import DcovParts, dc_stat, dcov_parts
from hdspecreg.screening.screen import ScreenReport, ScreenRule, names_to_indices, screen_threshold, screen_topk, tpr_fdr

__all__ = [
    "DcovParts",
    "dc_stat",
    "dcov_parts",
    "names_to_indices",
    "ScreenReport",
    "ScreenRule",
    "screen_threshold",
    "screen_topk",
    "tpr_fdr",
]
