"""
Special-regressor transform of the binary outcome.
"""

from hdspecreg.special_regressor.transform import (
    TransformConfig,
    TransformedData,
    transform,
    transform_with_density,
    ytilde,
    ytilde_one,
)

__all__ = ["TransformConfig", "TransformedData", "transform", "transform_with_density", "ytilde", "ytilde_one"]
