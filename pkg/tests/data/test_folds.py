"""
Unit tests for fold assignment and random streams.
"""

import unittest

import numpy as np

from hdspecreg.common.exceptions import DataError
from hdspecreg.data import SeedSpec, make_folds


class TestSeedSpec(unittest.TestCase):
    """
    Test cases for deterministic random streams.
    """

    def test_same_stream_same_draws(self) -> None:
        a = SeedSpec(7, 3).generator().normal(size=5)
        b = SeedSpec(7, 3).generator().normal(size=5)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self) -> None:
        a = SeedSpec(7, 3).generator().normal(size=5)
        b = SeedSpec(7, 4).generator().normal(size=5)
        self.assertFalse(np.allclose(a, b))
        c = SeedSpec(7, 3).child(1).generator().normal(size=5)
        self.assertFalse(np.allclose(a, c))

    def test_streams_are_uncorrelated(self) -> None:
        """
        Sibling streams and child streams show no cross-correlation over 1e5 draws.
        """
        base = SeedSpec(11, 0)
        a = base.generator().normal(size=100_000)
        for other in (SeedSpec(11, 1), base.child(1)):
            b = other.generator().normal(size=100_000)
            self.assertLess(abs(np.corrcoef(a, b)[0, 1]), 0.02)
            self.assertLess(abs(np.corrcoef(a[:-1], b[1:])[0, 1]), 0.02)

    def test_rejects_negative_seed(self) -> None:
        with self.assertRaises(DataError):
            SeedSpec(-1)
        with self.assertRaises(DataError):
            SeedSpec(0, 2**64)


class TestMakeFolds(unittest.TestCase):
    """
    Test cases for balanced K-fold splits.
    """

    def test_balanced_sizes(self) -> None:
        for n, k in ((10, 3), (103, 10), (7, 7)):
            folds = make_folds(n, k, SeedSpec(1))
            sizes = folds.sizes()
            self.assertEqual(sizes.sum(), n)
            self.assertLessEqual(sizes.max() - sizes.min(), 1)

    def test_splits_partition_the_sample(self) -> None:
        folds = make_folds(23, 4, SeedSpec(5, 2))
        seen = []
        for train, test in folds.splits():
            self.assertEqual(len(np.intersect1d(train, test)), 0)
            self.assertEqual(len(train) + len(test), 23)
            seen.extend(test.tolist())
        self.assertEqual(sorted(seen), list(range(23)))

    def test_deterministic(self) -> None:
        a = make_folds(40, 5, SeedSpec(9)).assignment
        b = make_folds(40, 5, SeedSpec(9)).assignment
        np.testing.assert_array_equal(a, b)

    def test_invalid_k(self) -> None:
        with self.assertRaises(DataError):
            make_folds(10, 1, SeedSpec(0))
        with self.assertRaises(DataError):
            make_folds(3, 4, SeedSpec(0))


if __name__ == "__main__":
    unittest.main()
