"""
SCAD-penalised least squares and GMM with cross-validated tuning.
"""

from hdspecreg.penalized.scad import ScadParams, scad_deriv, scad_penalty, scad_threshold, soft_threshold
from hdspecreg.penalized.scad_gmm import (
    GmmFit,
    GmmProblem,
    IvLayout,
    KktCheck,
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
    sigma_hat,
    standard_errors,
    two_step_weight,
)
from hdspecreg.penalized.scad_ls import ScadFit, fit_scad_ls, kkt_residuals, ls_objective, oracle_fit
from hdspecreg.penalized.tuning import cv_select_tuning, default_lambda_grid, fit_scad_ls_cv

__all__ = [
    "ScadParams",
    "scad_deriv",
    "scad_penalty",
    "scad_threshold",
    "soft_threshold",
    "GmmFit",
    "GmmProblem",
    "IvLayout",
    "KktCheck",
    "cv_select_gmm_tuning",
    "default_gmm_lambda_grid",
    "fit_scad_gmm",
    "fit_scad_gmm_cv",
    "gamma_theta",
    "gmm_closed_form",
    "gmm_objective",
    "kkt_validity_check",
    "moment_contributions",
    "sample_moments",
    "sigma_hat",
    "standard_errors",
    "two_step_weight",
    "ScadFit",
    "fit_scad_ls",
    "kkt_residuals",
    "ls_objective",
    "oracle_fit",
    "cv_select_tuning",
    "default_lambda_grid",
    "fit_scad_ls_cv",
]
