"""
Deterministic random-number streams.

Every stochastic routine draws from a ``numpy.random.Generator`` built from a
:class:`SeedSpec`. Replication ``r`` of a Monte Carlo run uses
``stream_id = r``, so results do not depend on how replications are scheduled
across workers.
"""

import logging
from dataclasses import dataclass

import numpy as np

from hdspecreg.common.exceptions import DataError

logger = logging.getLogger(__name__)

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeedSpec:
    """
    A (base seed, stream id) pair identifying one random stream.

    Attributes
    ----------
    base_seed : int
        Unsigned 64-bit experiment seed.
    stream_id : int
        Unsigned 64-bit stream index (replication number, fold split, ...).
    """

    base_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("base_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= _UINT64_MAX:
                raise DataError(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def generator(self) -> np.random.Generator:
        """
        Build the PCG64 generator for this stream.

        Returns
        -------
        np.random.Generator
            A fresh generator; calling twice yields identical draws.
        """
        seq = np.random.SeedSequence(int(self.base_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, offset: int) -> "SeedSpec":
        """
        Derive a sibling stream, e.g. for the fold split inside a replication.

        Parameters
        ----------
        offset : int
            Added to the base seed; the stream id is kept.

        Returns
        -------
        SeedSpec
            A distinct, deterministic stream.
        """
        return SeedSpec((int(self.base_seed) + int(offset)) % (_UINT64_MAX + 1), self.stream_id)
