"""
Flattening of nested result dictionaries.
"""

import logging
from typing import Any, Dict, Mapping

import numpy as np

logger = logging.getLogger(__name__)


def flatten_record(record: Mapping[str, Any], parent_key: str = "") -> Dict[str, Any]:
    """
    Flatten a nested dictionary to ``parent_child`` keys.

    Dots in keys are replaced by underscores; numpy scalars become Python
    scalars so records serialise cleanly.

    Parameters
    ----------
    record : Mapping[str, Any]
        Possibly nested result dictionary.
    parent_key : str, optional
        Prefix for every key.

    Returns
    -------
    Dict[str, Any]
        One level of scalar values.

    Examples
    --------
    .. code-block:: python

        flatten_record({"beta": {"x1": 0.0, "x2": 1.02}, "lambda": 0.1})
        # {"beta_x1": 0.0, "beta_x2": 1.02, "lambda": 0.1}
    """
    items: Dict[str, Any] = {}
    for key, value in record.items():
        key = str(key).replace(".", "_")
        new_key = f"{parent_key}_{key}" if parent_key else key
        if isinstance(value, Mapping):
            items.update(flatten_record(value, new_key))
        elif isinstance(value, np.generic):
            items[new_key] = value.item()
        else:
            items[new_key] = value
    return items
