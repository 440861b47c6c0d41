"""
hdspecreg package.
"""

# Re-export items from sub-packages
from hdspecreg.common.logging_setup import setup_global_logging
from hdspecreg.config import config
from hdspecreg.data import DataTable, Role, SeedSpec, load_csv
from hdspecreg.montecarlo import DesignSpec, gen_design, probit_fit, run_replications
from hdspecreg.penalized import GmmProblem, IvLayout, ScadParams, fit_scad_gmm, fit_scad_gmm_cv, fit_scad_ls, fit_scad_ls_cv
from hdspecreg.screening import dc_stat, screen_threshold, screen_topk
from hdspecreg.special_regressor import TransformConfig, transform, ytilde

__version__ = "0.1.0"

__all__ = [
    "setup_global_logging",
    "config",
    "DataTable",
    "Role",
    "SeedSpec",
    "load_csv",
    "DesignSpec",
    "gen_design",
    "probit_fit",
    "run_replications",
    "GmmProblem",
    "IvLayout",
    "ScadParams",
    "fit_scad_gmm",
    "fit_scad_gmm_cv",
    "fit_scad_ls",
    "fit_scad_ls_cv",
    "dc_stat",
    "screen_threshold",
    "screen_topk",
    "TransformConfig",
    "transform",
    "ytilde",
]
