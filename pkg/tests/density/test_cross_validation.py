"""
Unit tests for the leave-one-out cross-validation criterion.
"""

import unittest
import warnings

import numpy as np

from hdspecreg.common.exceptions import DataError, DegenerateDensityError
from hdspecreg.density import BandwidthVector, DensitySample, KernelSpec, cv_criterion, leave_one_out_terms


def naive_cv(sample: DensitySample, h: BandwidthVector, spec: KernelSpec) -> float:
    """
    Rebuild every leave-one-out estimator literally, with its 1/(n-1) factors.
    """
    k = spec.kernel()
    n = sample.n
    i_n1 = i_n2 = 0.0
    for i in range(n):
        others = [j for j in range(n) if j != i]
        w = {j: np.prod([k.scaled(sample.z[i, l] - sample.z[j, l], h.h_z[l]) for l in range(sample.d)]) for j in others}
        f_z = sum(w.values()) / (n - 1)
        f_vz = sum(w[j] * k.scaled(sample.v[i] - sample.v[j], h.h_v) for j in others) / (n - 1)
        g = sum(w[j] * w[m] * k.selfconv((sample.v[j] - sample.v[m]) / h.h_v) / h.h_v for j in others for m in others)
        g /= (n - 1) ** 2
        i_n1 += g / f_z**2
        i_n2 += f_vz / f_z
    return i_n1 / n - 2.0 * i_n2 / n


class TestCvCriterion(unittest.TestCase):
    """
    Test cases for cv_criterion and leave_one_out_terms.
    """

    def setUp(self) -> None:
        rng = np.random.default_rng(8)
        self.small = DensitySample(rng.normal(size=7), rng.normal(size=(7, 2)))
        self.h = BandwidthVector(0.7, (0.9, 1.3))

    def test_matches_naive_recomputation(self) -> None:
        for order in (2, 4):
            spec = KernelSpec(order)
            expected = naive_cv(self.small, self.h, spec)
            self.assertAlmostEqual(cv_criterion(self.small, self.h, spec), expected, delta=1e-12 * max(1.0, abs(expected)))

    def test_three_point_sample(self) -> None:
        sample = DensitySample([0.1, -0.4, 1.2], [[0.3], [0.0], [-0.8]])
        h = BandwidthVector(0.5, (0.6,))
        spec = KernelSpec(2)
        self.assertAlmostEqual(cv_criterion(sample, h, spec), naive_cv(sample, h, spec), delta=1e-12)

    def test_scaling(self) -> None:
        """
        Rescaling data and bandwidths by c divides the criterion by c.
        """
        c = 3.5
        spec = KernelSpec(2)
        scaled = DensitySample(c * self.small.v, c * self.small.z)
        h_scaled = BandwidthVector.from_array(c * self.h.as_array())
        base = cv_criterion(self.small, self.h, spec)
        self.assertAlmostEqual(cv_criterion(scaled, h_scaled, spec), base / c, delta=1e-10 * abs(base))

    def test_flat_v_kernel_sends_i_n2_to_zero(self) -> None:
        terms = leave_one_out_terms(self.small, BandwidthVector(1e6, self.h.h_z), KernelSpec(2))
        self.assertLess(abs(terms.i_n2), 1e-6)

    def test_vanishing_denominator(self) -> None:
        """
        An isolated observation whose leave-one-out f(z) is positive but
        squares to zero is rejected instead of producing NaN.
        """
        sample = DensitySample([0.2, -0.1, 0.5], [[0.0], [0.1], [30.0]])
        h = BandwidthVector(1.0, (1.0,))
        with warnings.catch_warnings():
            warnings.simplefilter("error", RuntimeWarning)
            with self.assertRaisesRegex(DegenerateDensityError, "observation 2"):
                leave_one_out_terms(sample, h, KernelSpec(2))
            with self.assertRaises(DegenerateDensityError):
                cv_criterion(DensitySample([0.2, -0.1, 0.5], [[0.0], [0.1], [100.0]]), h, KernelSpec(2))

    def test_errors(self) -> None:
        with self.assertRaises(DataError):
            cv_criterion(DensitySample([0.0, 1.0], [0.0, 1.0]), BandwidthVector(1.0, (1.0,)), KernelSpec(2))
        with self.assertRaises(DataError):
            cv_criterion(self.small, BandwidthVector(1.0, (1.0,)), KernelSpec(2))


if __name__ == "__main__":
    unittest.main()
