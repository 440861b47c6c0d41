"""
Balanced random fold assignment for K-fold cross-validation.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from hdspecreg.common.exceptions import DataError
from hdspecreg.data.random_streams import SeedSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldAssignment:
    """
    Fold labels in ``[0, k)`` for each of ``n`` observations.

    Attributes
    ----------
    k : int
        Number of folds.
    assignment : np.ndarray
        Integer array of length n.
    """

    k: int
    assignment: np.ndarray

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def splits(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """
        Yield ``(train_idx, test_idx)`` for every fold in label order.
        """
        for fold in range(self.k):
            test = self.assignment == fold
            yield np.flatnonzero(~test), np.flatnonzero(test)


def make_folds(n: int, k: int, seed: SeedSpec) -> FoldAssignment:
    """
    Split ``n`` observations into ``k`` folds whose sizes differ by at most one.

    Parameters
    ----------
    n : int
        Number of observations.
    k : int
        Number of folds, ``2 <= k <= n``.
    seed : SeedSpec
        Stream used for the permutation.

    Returns
    -------
    FoldAssignment
        Deterministic given ``(n, k, seed)``. The multiset of fold sizes only
        depends on ``(n, k)``.

    Raises
    ------
    DataError
        If ``k < 2`` or ``k > n``.
    """
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    if k > n:
        raise DataError(f"k={k} exceeds n={n}")

    labels = np.arange(n) % k
    rng = seed.generator()
    assignment = rng.permutation(labels)
    assignment.setflags(write=False)
    return FoldAssignment(k=k, assignment=assignment)
