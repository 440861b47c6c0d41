"""
Simulation designs, Probit baseline and the Monte Carlo replication harness.
"""

from hdspecreg.montecarlo.designs import DesignSpec, DesignTruth, design_regressor_matrix, design_truth, gen_design
from hdspecreg.montecarlo.metrics import coefficient_metrics, metrics_table
from hdspecreg.montecarlo.probit import ProbitFit, check_separation, probit_fit, probit_mle
from hdspecreg.montecarlo.replications import (
    ESTIMATORS,
    FULL_REPLICATIONS,
    McReport,
    PipelineConfig,
    ReplicationResult,
    aggregate,
    default_estimators,
    run_one_replication,
    run_replications,
)
from hdspecreg.montecarlo.summary import format_table, summarize, summarize_all

__all__ = [
    "DesignSpec",
    "DesignTruth",
    "design_regressor_matrix",
    "design_truth",
    "gen_design",
    "coefficient_metrics",
    "metrics_table",
    "ProbitFit",
    "check_separation",
    "probit_fit",
    "probit_mle",
    "ESTIMATORS",
    "FULL_REPLICATIONS",
    "McReport",
    "PipelineConfig",
    "ReplicationResult",
    "aggregate",
    "default_estimators",
    "run_one_replication",
    "run_replications",
    "format_table",
    "summarize",
    "summarize_all",
]
