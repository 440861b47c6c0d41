"""
Unit tests for SCAD-GMM with candidate-instrument invalidity parameters.
"""

import unittest

import numpy as np

from hdspecreg.common.exceptions import DataError, RankDeficiencyError
from hdspecreg.data import DataTable, SeedSpec
from hdspecreg.penalized import (
    GmmProblem,
    IvLayout,
    ScadParams,
    cv_select_gmm_tuning,
    default_gmm_lambda_grid,
    fit_scad_gmm,
    fit_scad_gmm_cv,
    gamma_theta,
    gmm_closed_form,
    gmm_objective,
    kkt_validity_check,
    moment_contributions,
    sample_moments,
    scad_penalty,
    sigma_hat,
    two_step_weight,
)

LAYOUT = IvLayout(("const", "z1", "z2"), ("w1", "w2", "w3", "w4"), ("const", "x1"))


def make_problem(n: int, seed: int, scale: float = 1.0) -> GmmProblem:
    """
    Two valid candidates (w1, w2) and two invalid ones (w3, w4) with
    ``eta = 1.2`` each; true ``beta = (1, 2)``.
    """
    rng = np.random.default_rng(seed)
    z1, z2, w1, w2, w3, w4, u, e = rng.normal(size=(8, n))
    x1 = z1 + z2 + 0.5 * u
    eps = 1.2 * w3 + 1.2 * w4 + e
    y = 1.0 + 2.0 * x1 + eps
    z = np.column_stack((np.ones(n), z1, z2, w1, w2, w3, w4))
    x = np.column_stack((np.ones(n), x1))
    return GmmProblem(LAYOUT, scale * z, x, scale * y)


class TestIvLayout(unittest.TestCase):
    """
    Test cases for instrument role validation.
    """

    def test_instruments_are_known_valid_first(self) -> None:
        self.assertEqual(LAYOUT.instruments, ("const", "z1", "z2", "w1", "w2", "w3", "w4"))

    def test_requires_known_valid(self) -> None:
        with self.assertRaises(DataError):
            IvLayout((), ("w1",), ("x1",))

    def test_rejects_overlap(self) -> None:
        with self.assertRaises(DataError):
            IvLayout(("z1",), ("z1", "w1"), ("x1",))

    def test_rejects_underidentification(self) -> None:
        with self.assertRaises(DataError):
            IvLayout(("z1",), ("w1",), ("x1", "x2"))


class TestGmmProblem(unittest.TestCase):
    """
    Test cases for problem construction and the moment vector.
    """

    def setUp(self) -> None:
        self.problem = make_problem(300, 1)

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(DataError):
            GmmProblem(LAYOUT, self.problem.z[:, :5], self.problem.x, self.problem.y)
        with self.assertRaises(DataError):
            GmmProblem(LAYOUT, self.problem.z, self.problem.x, self.problem.y[:-1])

    def test_rejects_non_finite(self) -> None:
        y = self.problem.y.copy()
        y[3] = np.nan
        with self.assertRaises(DataError):
            GmmProblem(LAYOUT, self.problem.z, self.problem.x, y)

    def test_from_table(self) -> None:
        names = list(LAYOUT.instruments) + ["x1"]
        columns = {name: self.problem.z[:, j] for j, name in enumerate(LAYOUT.instruments)}
        columns["x1"] = self.problem.x[:, 1]
        table = DataTable({name: columns[name] for name in names})
        problem = GmmProblem.from_table(table, self.problem.y, LAYOUT)
        np.testing.assert_array_equal(problem.z, self.problem.z)
        np.testing.assert_array_equal(problem.x, self.problem.x)
        with self.assertRaises(DataError):
            GmmProblem.from_table(table, self.problem.y[:10], LAYOUT)

    def test_zero_theta_gives_raw_cross_products(self) -> None:
        p = self.problem
        m = sample_moments(p, np.zeros(p.s), np.zeros(p.d))
        np.testing.assert_allclose(m, p.z.T @ p.y / p.n, atol=1e-12)

    def test_moments_are_mean_of_contributions(self) -> None:
        p = self.problem
        rng = np.random.default_rng(2)
        beta, eta = rng.normal(size=p.s), rng.normal(size=p.d)
        expected = moment_contributions(p, beta, eta).mean(axis=0)
        np.testing.assert_allclose(sample_moments(p, beta, eta), expected, atol=1e-12)

    def test_hand_computed_moments(self) -> None:
        layout = IvLayout(("z",), ("w",), ("x",))
        problem = GmmProblem(layout, [[1.0, 2.0], [2.0, 0.0], [0.0, 1.0]], [[1.0], [1.0], [2.0]], [3.0, 1.0, 2.0])
        # residuals at beta=1: (2, 0, 0); eta=0.5
        m = sample_moments(problem, np.array([1.0]), np.array([0.5]))
        np.testing.assert_allclose(m, [2.0 / 3.0, 4.0 / 3.0 - 0.5], atol=1e-12)

    def test_theta_size_mismatch(self) -> None:
        with self.assertRaises(DataError):
            sample_moments(self.problem, np.zeros(3), np.zeros(4))


class TestGmmObjective(unittest.TestCase):
    """
    Test cases for the penalised quadratic form.
    """

    def setUp(self) -> None:
        self.problem = make_problem(200, 3)
        rng = np.random.default_rng(4)
        self.beta = rng.normal(size=2)
        self.eta = rng.normal(size=4)
        self.W = np.eye(7)

    def test_unpenalised_is_quadratic_form(self) -> None:
        m = sample_moments(self.problem, self.beta, self.eta)
        self.assertAlmostEqual(gmm_objective(self.problem, self.beta, self.eta, self.W), float(m @ m), delta=1e-12)

    def test_zeroing_one_eta_changes_both_terms(self) -> None:
        params = ScadParams(0.4, 3.7)
        eta0 = self.eta.copy()
        eta0[2] = 0.0
        m1 = sample_moments(self.problem, self.beta, self.eta)
        m0 = sample_moments(self.problem, self.beta, eta0)
        expected = float(m1 @ m1 - m0 @ m0) + float(scad_penalty(abs(self.eta[2]), params))
        diff = gmm_objective(self.problem, self.beta, self.eta, self.W, params) - gmm_objective(
            self.problem, self.beta, eta0, self.W, params
        )
        self.assertAlmostEqual(diff, expected, delta=1e-10)

    def test_rejects_bad_weights(self) -> None:
        asymmetric = np.eye(7)
        asymmetric[0, 1] = 0.5
        indefinite = np.eye(7)
        indefinite[3, 3] = -1.0
        for W in (np.eye(6), asymmetric, indefinite):
            with self.assertRaises(DataError):
                gmm_objective(self.problem, self.beta, self.eta, W)


class TestClosedForm(unittest.TestCase):
    """
    Test cases for unpenalised GMM.
    """

    def test_just_identified_exogenous_is_ols(self) -> None:
        rng = np.random.default_rng(5)
        x = np.column_stack((np.ones(400), rng.normal(size=400)))
        y = x @ np.array([0.5, -1.0]) + rng.normal(size=400)
        layout = IvLayout(("const", "x1"), (), ("const", "x1"))
        problem = GmmProblem(layout, x, x, y)
        ols = np.linalg.lstsq(x, y, rcond=None)[0]
        beta, eta = gmm_closed_form(problem, np.eye(2))
        np.testing.assert_allclose(beta, ols, atol=1e-8)
        self.assertEqual(eta.shape, (0,))
        fit = fit_scad_gmm(problem, np.eye(2), ScadParams(0.1))
        np.testing.assert_allclose(fit.beta, ols, atol=1e-8)

    def test_no_valid_candidates_zeroes_candidate_moments(self) -> None:
        problem = make_problem(300, 6)
        beta, eta = gmm_closed_form(problem, np.eye(7))
        m = sample_moments(problem, beta, eta)
        np.testing.assert_allclose(m[problem.k_star :], 0.0, atol=1e-12)

    def test_index_out_of_range(self) -> None:
        with self.assertRaises(DataError):
            gmm_closed_form(make_problem(100, 7), np.eye(7), [4])


class TestFitScadGmm(unittest.TestCase):
    """
    Test cases for the penalised GMM solver.
    """

    @classmethod
    def setUpClass(cls) -> None:
        cls.problem = make_problem(2000, 11)
        cls.W = np.eye(7)
        cls.params = ScadParams(0.5, 3.0)
        cls.fit = fit_scad_gmm(cls.problem, cls.W, cls.params)

    def test_classifies_candidates(self) -> None:
        self.assertTrue(self.fit.converged)
        self.assertEqual(self.fit.classified_valid, frozenset({0, 1}))
        self.assertEqual(self.fit.detected_invalid, [2, 3])
        np.testing.assert_allclose(self.fit.beta, [1.0, 2.0], atol=0.2)

    def test_exact_zero_discipline(self) -> None:
        for value in self.fit.eta:
            self.assertTrue(value == 0.0 or abs(value) > 1e-10)

    def test_objective_path_is_monotone(self) -> None:
        path = np.array(self.fit.objective_path)
        self.assertTrue(np.all(np.diff(path) <= 1e-12 * np.maximum(1.0, np.abs(path[:-1]))))
        expected = gmm_objective(self.problem, self.fit.beta, self.fit.eta, self.W, self.params)
        self.assertAlmostEqual(self.fit.objective, expected, delta=1e-10)

    def test_kkt_conditions_hold(self) -> None:
        checks = kkt_validity_check(self.problem, self.fit)
        self.assertEqual(len(checks), 4)
        self.assertTrue(all(check.passes for check in checks))
        self.assertEqual([check.candidate for check in checks], [0, 1, 2, 3])

    def test_kkt_flags_violation(self) -> None:
        m = sample_moments(self.problem, self.fit.beta, self.fit.eta)
        score = abs(m[self.problem.k_star])
        # |score| = 0.6 lambda violates the lambda / 2 bound
        violated = ScadParams(score / 0.6, 3.0)
        satisfied = ScadParams(score / 0.4, 3.0)
        self.assertFalse(kkt_validity_check(self.problem, self.fit, violated, slack=0.0)[0].passes)
        self.assertTrue(kkt_validity_check(self.problem, self.fit, satisfied, slack=0.0)[0].passes)

    def test_large_lambda_zeroes_every_eta(self) -> None:
        params = ScadParams(100.0 * float(np.max(np.abs(self.problem.c))), 3.7)
        fit = fit_scad_gmm(self.problem, self.W, params)
        self.assertEqual(fit.classified_valid, frozenset(range(4)))
        beta, _ = gmm_closed_form(self.problem, self.W, range(4))
        np.testing.assert_allclose(fit.beta, beta, atol=1e-8)
        self.assertTrue(all(check.passes for check in kkt_validity_check(self.problem, fit)))

    def test_joint_rescaling_keeps_pattern(self) -> None:
        scaled = make_problem(2000, 11, scale=2.0)
        fit = fit_scad_gmm(scaled, self.W, ScadParams(4.0 * self.params.lam, self.params.a))
        self.assertEqual(fit.classified_valid, self.fit.classified_valid)

    def test_rank_deficiency(self) -> None:
        layout = IvLayout(("const", "const2"), ("w1",), ("const", "x1"))
        p = self.problem
        z = np.column_stack((p.z[:, 0], p.z[:, 0], p.z[:, 3]))
        with self.assertRaises(RankDeficiencyError):
            fit_scad_gmm(GmmProblem(layout, z, p.x, p.y), np.eye(3), self.params)

    def test_init_size_checked(self) -> None:
        with self.assertRaises(DataError):
            fit_scad_gmm(self.problem, self.W, self.params, init=(np.zeros(2), np.zeros(3)))

    def test_report(self) -> None:
        report = self.fit.with_sigma(sigma_hat(self.problem, self.fit)).report(self.problem.n)
        self.assertEqual(report["valid"], "w1,w2")
        self.assertEqual(report["invalid"], "w3,w4")
        self.assertEqual(set(report["std_error"]), {"const", "x1", "w3", "w4"})


class TestInference(unittest.TestCase):
    """
    Test cases for the Jacobian, sandwich covariance and two-step weighting.
    """

    @classmethod
    def setUpClass(cls) -> None:
        cls.problem = make_problem(1000, 12)
        cls.fit = fit_scad_gmm(cls.problem, np.eye(7), ScadParams(0.5, 3.0))

    def test_gamma_theta_blocks(self) -> None:
        p = self.problem
        np.testing.assert_array_equal(gamma_theta(p, []), p.g)
        gamma = gamma_theta(p, [3, 1])
        self.assertEqual(gamma.shape, (7, 4))
        np.testing.assert_array_equal(gamma[:, :2], p.g)
        expected = np.zeros((7, 2))
        expected[p.k_star + 1, 0] = -1.0
        expected[p.k_star + 3, 1] = -1.0
        np.testing.assert_array_equal(gamma[:, 2:], expected)
        with self.assertRaises(DataError):
            gamma_theta(p, [4])

    def test_sigma_is_symmetric_psd(self) -> None:
        sigma = sigma_hat(self.problem, self.fit)
        size = 2 + len(self.fit.detected_invalid)
        self.assertEqual(sigma.shape, (size, size))
        np.testing.assert_array_equal(sigma, sigma.T)
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(sigma)), -1e-10)

    def test_sigma_invariant_to_weight_scale(self) -> None:
        W = np.eye(7)
        np.testing.assert_allclose(
            sigma_hat(self.problem, self.fit, W), sigma_hat(self.problem, self.fit, 3.0 * W), rtol=1e-9, atol=1e-12
        )

    def test_sigma_matches_iv_variance(self) -> None:
        """
        Just identified and homoskedastic: the slope variance is
        ``sigma^2 var(z) / cov(z, x)^2 = 1``.
        """
        rng = np.random.default_rng(13)
        n = 5000
        z1, v, e = rng.normal(size=(3, n))
        x1 = z1 + 0.5 * v
        y = 1.0 + 2.0 * x1 + e
        layout = IvLayout(("const", "z1"), (), ("const", "x1"))
        problem = GmmProblem(layout, np.column_stack((np.ones(n), z1)), np.column_stack((np.ones(n), x1)), y)
        fit = fit_scad_gmm(problem, np.eye(2), ScadParams(0.1))
        sigma = sigma_hat(problem, fit)
        self.assertAlmostEqual(sigma[1, 1], 1.0, delta=0.15)

    def test_two_step_weight_inverts_omega(self) -> None:
        p = self.problem
        beta, eta = gmm_closed_form(p, np.eye(7))
        W = two_step_weight(p, beta, eta)
        g = moment_contributions(p, beta, eta)
        omega = g.T @ g / p.n
        np.testing.assert_array_equal(W, W.T)
        np.testing.assert_allclose(W @ omega, np.eye(7), atol=1e-8)


class TestGmmTuning(unittest.TestCase):
    """
    Test cases for cross-validated SCAD-GMM tuning.
    """

    @classmethod
    def setUpClass(cls) -> None:
        cls.problem = make_problem(600, 21)

    def test_default_grid_scale(self) -> None:
        p = self.problem
        grid = default_gmm_lambda_grid(p, size=5)
        scale = np.std(p.y, ddof=1) * np.sqrt(p.p_n / p.n)
        np.testing.assert_allclose(grid[[0, -1]], [0.01 * scale, 2.0 * scale])

    def test_cv_table_and_selection(self) -> None:
        grid = [0.05, 0.2, 0.5, 1.0]
        params, table = cv_select_gmm_tuning(self.problem, np.eye(7), grid, (3.0, 3.7), k=5, seed=SeedSpec(1))
        self.assertEqual(len(table), 8)
        self.assertEqual(list(table.columns), ["lambda", "a", "cv_error", "failed_folds"])
        self.assertEqual(int(table["failed_folds"].sum()), 0)
        best = table.loc[(table["lambda"] == params.lam) & (table["a"] == params.a), "cv_error"].iloc[0]
        self.assertEqual(best, table["cv_error"].min())

    def test_cv_is_deterministic(self) -> None:
        grid = [0.1, 0.5]
        first = cv_select_gmm_tuning(self.problem, np.eye(7), grid, (3.7,), k=4, seed=SeedSpec(2))
        second = cv_select_gmm_tuning(self.problem, np.eye(7), grid, (3.7,), k=4, seed=SeedSpec(2))
        self.assertEqual(first[0], second[0])
        np.testing.assert_array_equal(first[1]["cv_error"].to_numpy(), second[1]["cv_error"].to_numpy())

    def test_empty_grid(self) -> None:
        with self.assertRaises(DataError):
            cv_select_gmm_tuning(self.problem, np.eye(7), [], (3.7,), k=5)

    def test_fit_cv_attaches_sigma(self) -> None:
        for weighting in ("identity", "two_step"):
            fit, table = fit_scad_gmm_cv(self.problem, weighting, [0.1, 0.4, 1.0], (3.7,), k=5, seed=SeedSpec(3))
            self.assertEqual(len(table), 3)
            self.assertIsNotNone(fit.sigma_hat)
            size = 2 + len(fit.detected_invalid)
            self.assertEqual(fit.sigma_hat.shape, (size, size))
            if weighting == "identity":
                self.assertTrue({2, 3} <= set(fit.detected_invalid))

    def test_unknown_weighting(self) -> None:
        with self.assertRaises(DataError):
            fit_scad_gmm_cv(self.problem, "optimal", [0.5], (3.7,), k=5)


if __name__ == "__main__":
    unittest.main()
