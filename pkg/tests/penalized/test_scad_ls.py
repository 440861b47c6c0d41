"""
Unit tests for SCAD-penalised least squares.
"""

import unittest

import numpy as np

from hdspecreg.common.exceptions import DataError, RankDeficiencyError
from hdspecreg.penalized import ScadParams, fit_scad_ls, ls_objective, scad_threshold
from hdspecreg.penalized.scad_ls import initial_estimate, kkt_residuals, oracle_fit


def orthonormal_design(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(n, p)))
    return np.sqrt(n) * q


class TestFitScadLs(unittest.TestCase):
    """
    Test cases for the local-linear-approximation solver.
    """

    def setUp(self) -> None:
        rng = np.random.default_rng(10)
        self.X = rng.normal(size=(150, 8))
        self.beta = np.array([2.0, -1.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
        self.y = self.X @ self.beta + rng.normal(size=150)

    def test_tiny_lambda_gives_ols(self) -> None:
        fit = fit_scad_ls(self.X, self.y, ScadParams(1e-12))
        ols = np.linalg.lstsq(self.X, self.y, rcond=None)[0]
        np.testing.assert_allclose(fit.beta, ols, atol=1e-6)

    def test_orthonormal_design_matches_thresholding(self) -> None:
        """
        With X'X/n = I each coefficient is the thresholded marginal OLS value.
        """
        rng = np.random.default_rng(3)
        for _ in range(100):
            X = orthonormal_design(40, 5, rng)
            y = X @ rng.normal(scale=1.5, size=5) + rng.normal(size=40)
            z = X.T @ y / 40
            params = ScadParams(rng.uniform(0.05, 0.8) * np.max(np.abs(z)), 3.7)
            fit = fit_scad_ls(X, y, params)
            np.testing.assert_allclose(fit.beta, scad_threshold(z, params), atol=1e-6)

    def test_objective_is_monotone(self) -> None:
        fit = fit_scad_ls(self.X, self.y, ScadParams(0.3, 3.0))
        path = np.array(fit.objective_path)
        self.assertTrue(np.all(np.diff(path) <= 1e-12 * np.maximum(1.0, np.abs(path[:-1]))))
        self.assertAlmostEqual(fit.objective, ls_objective(self.X, self.y, fit.beta, fit.params), delta=1e-10)

    def test_kkt_conditions_at_convergence(self) -> None:
        fit = fit_scad_ls(self.X, self.y, ScadParams(0.25, 3.7))
        self.assertTrue(fit.converged)
        self.assertLess(np.max(kkt_residuals(self.X, self.y, fit)), 1e-6)

    def test_recovers_sparse_support(self) -> None:
        fit = fit_scad_ls(self.X, self.y, ScadParams(0.25, 3.7))
        self.assertEqual(fit.active, frozenset({0, 1, 4}))
        self.assertTrue(all(fit.beta[j] == 0.0 for j in (2, 3, 5, 6, 7)))

    def test_column_permutation(self) -> None:
        perm = np.array([3, 0, 7, 1, 5, 2, 6, 4])
        params = ScadParams(0.25, 3.7)
        a = fit_scad_ls(self.X, self.y, params)
        b = fit_scad_ls(self.X[:, perm], self.y, params)
        np.testing.assert_allclose(b.beta, a.beta[perm], atol=1e-5)

    def test_unpenalized_intercept(self) -> None:
        X = np.column_stack((np.ones(150), self.X))
        y = self.y + 0.05
        fit = fit_scad_ls(X, y, ScadParams(5.0, 3.7), unpenalized=(0,))
        self.assertEqual(fit.active, frozenset({0}))
        self.assertAlmostEqual(fit.beta[0], float(np.mean(y)), places=6)
        self.assertEqual(fit.unpenalized, (0,))

    def test_report(self) -> None:
        fit = fit_scad_ls(self.X[:, :2], self.y, ScadParams(0.1))
        report = fit.report(["u", "w"])
        self.assertEqual(set(report["beta"]), {"u", "w"})
        self.assertEqual(report["active"], "u,w")

    def test_errors(self) -> None:
        with self.assertRaises(DataError):
            fit_scad_ls(self.X, self.y[:10], ScadParams(0.1))
        with self.assertRaises(DataError):
            fit_scad_ls(self.X, self.y, ScadParams(0.1), init=np.zeros(3))
        with self.assertRaises(DataError):
            fit_scad_ls(self.X, self.y, ScadParams(0.1), unpenalized=(9,))

    def test_ridge_start_when_p_is_large(self) -> None:
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 15))
        start = initial_estimate(X, rng.normal(size=20))
        self.assertEqual(start.shape, (15,))
        self.assertTrue(np.all(np.isfinite(start)))


class TestOracleFit(unittest.TestCase):
    """
    Test cases for OLS on a known support.
    """

    def setUp(self) -> None:
        rng = np.random.default_rng(4)
        self.X = rng.normal(size=(60, 4))
        self.y = self.X @ np.array([1.0, 0.0, -2.0, 0.0]) + rng.normal(size=60)

    def test_full_support_is_ols(self) -> None:
        np.testing.assert_allclose(oracle_fit(self.X, self.y, range(4)), np.linalg.lstsq(self.X, self.y, rcond=None)[0])

    def test_zeros_off_support(self) -> None:
        beta = oracle_fit(self.X, self.y, {0, 2})
        self.assertEqual(beta[1], 0.0)
        self.assertEqual(beta[3], 0.0)

    def test_errors(self) -> None:
        with self.assertRaises(DataError):
            oracle_fit(self.X, self.y, set())
        with self.assertRaises(DataError):
            oracle_fit(self.X, self.y, {7})
        X = np.column_stack((self.X[:, 0], 2.0 * self.X[:, 0]))
        with self.assertRaises(RankDeficiencyError):
            oracle_fit(X, self.y, {0, 1})


if __name__ == "__main__":
    unittest.main()
