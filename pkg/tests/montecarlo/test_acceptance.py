"""
Desk-scale Monte Carlo checks of the estimators against known design behaviour.

Every test here runs hundreds of replications and is skipped unless pytest is
given ``--runslow``.
"""

import os
import unittest

import pytest

from hdspecreg.density import OptimizerConfig
from hdspecreg.montecarlo import DesignSpec, McReport, PipelineConfig, run_replications
from hdspecreg.montecarlo.designs import PROBIT_SCALE
from hdspecreg.special_regressor import TransformConfig

# reduced bandwidth-search budget; everything else at its default
DESK = PipelineConfig(transform=TransformConfig(optimizer=OptimizerConfig(restarts=1, max_evals_per_dim=100)))
WORKERS = max(1, min(4, os.cpu_count() or 1))
SEED = 2024


def failure_rate(report: McReport, estimator: str) -> float:
    return report.failures[estimator] / report.replications


@pytest.mark.slow
class TestProbitBaseline(unittest.TestCase):
    """
    Test cases for the Probit scale under the correctly specified design.
    """

    def test_gamma_design1(self) -> None:
        report = run_replications(DesignSpec(1, 5000), ("probit",), replications=50, seed=SEED, workers=WORKERS)
        self.assertEqual(report.failures["probit"], 0)
        self.assertAlmostEqual(report.selection["probit_gamma"], PROBIT_SCALE, delta=0.03)
        self.assertLess(abs(report.metrics["probit"].loc["x2", "MEANB"]), 0.05)


@pytest.mark.slow
class TestVariableSelection(unittest.TestCase):
    """
    Test cases for screening and SCAD-LS on designs 1 and 3 at n = 500.
    """

    def check_scad_ls(self, report: McReport, meanb_low: float, rmse_max: float) -> None:
        self.assertLessEqual(failure_rate(report, "scad_ls"), 0.02)
        metrics = report.metrics["scad_ls"]
        self.assertGreaterEqual(metrics.loc["x2", "MEANB"], meanb_low)
        self.assertLessEqual(metrics.loc["x2", "MEANB"], 0.05)
        self.assertLessEqual(metrics.loc["x2", "RMSE"], rmse_max)
        self.assertGreaterEqual(report.selection["beta1_zero"], 0.55)
        self.assertLessEqual(report.selection["l0_norm"], 9.0)
        self.assertEqual(report.selection.get("kkt_ok", 1.0), 1.0)

    def test_design1(self) -> None:
        report = run_replications(DesignSpec(1, 500), ("scad_ls",), replications=200, cfg=DESK, seed=SEED, workers=WORKERS)
        self.assertGreaterEqual(report.selection["screen_x1"], 0.99)
        self.assertGreaterEqual(report.selection["screen_x2"], 0.85)
        self.check_scad_ls(report, meanb_low=-0.15, rmse_max=0.40)

    def test_design3(self) -> None:
        """
        Correlated regressors strengthen screening and leave a somewhat
        larger small-sample bias.
        """
        report = run_replications(DesignSpec(3, 500), ("scad_ls",), replications=200, cfg=DESK, seed=SEED, workers=WORKERS)
        self.assertGreaterEqual(report.selection["screen_x1"], 0.99)
        self.assertGreaterEqual(report.selection["screen_x2"], 0.85)
        self.check_scad_ls(report, meanb_low=-0.20, rmse_max=0.45)


@pytest.mark.slow
class TestHeteroskedasticity(unittest.TestCase):
    """
    Test cases for design 2, where the error scale depends on x3.
    """

    def test_probit_biased_special_regressor_not(self) -> None:
        report = run_replications(
            DesignSpec(2, 1000), ("scad_ls", "probit"), replications=200, cfg=DESK, seed=SEED, workers=WORKERS
        )
        self.assertLessEqual(failure_rate(report, "scad_ls"), 0.02)
        probit = report.metrics["probit"]
        scad = report.metrics["scad_ls"]
        self.assertLessEqual(probit.loc["x3", "MEANB"], -0.07)
        self.assertLess(abs(probit.loc["x2", "MEANB"]), 0.05)
        self.assertLessEqual(abs(scad.loc["x3", "MEANB"]), 0.08)


@pytest.mark.slow
class TestMomentSelection(unittest.TestCase):
    """
    Test cases for SCAD-GMM on design 4 at n = 1000.
    """

    def test_design4(self) -> None:
        report = run_replications(
            DesignSpec(4, 1000), ("scad_gmm", "oracle"), replications=100, cfg=DESK, seed=SEED, workers=WORKERS
        )
        self.assertLessEqual(failure_rate(report, "scad_gmm"), 0.02)
        self.assertGreaterEqual(report.selection["invalid_all_detected"], 0.75)
        self.assertGreaterEqual(report.selection["valid_selected"], 2.2)
        self.assertGreaterEqual(report.selection["screen_relevant"], 0.99)
        self.assertLessEqual(abs(report.metrics["scad_gmm"].loc["x", "MEANB"]), 0.10)
        self.assertLessEqual(abs(report.metrics["oracle"].loc["x", "MEANB"]), 0.10)
        self.assertEqual(report.selection.get("kkt_ok", 1.0), 1.0)


if __name__ == "__main__":
    unittest.main()
