"""
Command-line front end for hdspecreg.

Every command reads its defaults from the configuration file given with
``--config`` (by default configs_json/hdspecreg_config.json when it exists,
otherwise the built-in defaults), applies the flags on top, runs one
step of the pipeline and writes its reports to ``--output``.

Exit codes: 0 on success, 1 on a data or configuration error, 2 on a
numerical failure or a usage error.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from hdspecreg.common.exceptions import EXIT_OK, HdSpecRegError, UsageError, exit_code_for
from hdspecreg.common.logging_setup import setup_global_logging
from hdspecreg.config import config
from hdspecreg.data import DataTable, Role, SeedSpec, load_csv
from hdspecreg.density import DensitySample, KernelSpec, OptimizerConfig, select_bandwidths
from hdspecreg.montecarlo import (
    FULL_REPLICATIONS,
    DesignSpec,
    PipelineConfig,
    format_table,
    gen_design,
    probit_fit,
    run_replications,
    summarize_all,
)
from hdspecreg.montecarlo.designs import CONSTANT_COLUMN
from hdspecreg.penalized import (
    GmmProblem,
    IvLayout,
    ScadParams,
    default_gmm_lambda_grid,
    default_lambda_grid,
    fit_scad_gmm,
    fit_scad_gmm_cv,
    fit_scad_ls,
    fit_scad_ls_cv,
    kkt_validity_check,
    sigma_hat,
)
from hdspecreg.reports import ReportService
from hdspecreg.screening import screen_threshold, screen_topk
from hdspecreg.special_regressor import TransformConfig, transform

logger = logging.getLogger(__name__)


def _names(text: Optional[str]) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()] if text else []


def build_parser() -> argparse.ArgumentParser:
    """
    Parser with one sub-command per pipeline step.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or key=value configuration file")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="override logging.logging_level")
    common.add_argument("--output", help="output directory (overrides output.dir)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", required=True, help="CSV file with a header row")
    data.add_argument("--y", default="y", help="binary outcome column")
    data.add_argument("--v", default="v", help="special regressor column")

    transform_opts = argparse.ArgumentParser(add_help=False)
    transform_opts.add_argument("--p-tilde", type=int, help="conditioning columns kept after screening")
    transform_opts.add_argument("--kernel-order", type=int, choices=[2, 4], help="kernel order for f(v|z)")
    transform_opts.add_argument("--floor", type=float, help="density floor in [0, 0.5)")
    transform_opts.add_argument("--seed", type=int, default=0, help="base seed")

    tuning = argparse.ArgumentParser(add_help=False)
    tuning.add_argument("--lambda", dest="lam", type=float, help="fixed lambda (skips cross-validation)")
    tuning.add_argument("--a", type=float, help="fixed a > 2, only together with --lambda (default 3.7)")
    tuning.add_argument("--folds", type=int, help="cross-validation folds")
    tuning.add_argument("--no-intercept", action="store_true", help="do not add a constant regressor")

    parser = argparse.ArgumentParser(prog="hdspecreg", description="High-dimensional special-regressor binary choice")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("screen", parents=[common], help="rank columns by distance covariance with v")
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--v", default="v", help="special regressor column")
    p.add_argument("--z", required=True, help="comma-separated candidate columns")
    rule = p.add_mutually_exclusive_group()
    rule.add_argument("--top", type=int, help="keep the top k columns")
    rule.add_argument("--threshold", type=float, help="keep columns with T >= c log(n)^0.75")

    p = sub.add_parser("density", parents=[common, data], help="select bandwidths and evaluate f(v|z)")
    p.add_argument("--z", required=True, help="comma-separated conditioning columns")
    p.add_argument("--kernel-order", type=int, choices=[2, 4], help="kernel order")

    p = sub.add_parser("transform", parents=[common, data, transform_opts], help="screen, estimate f(v|z), write y_tilde")
    p.add_argument("--z", help="comma-separated conditioning candidates (default: instruments or regressors)")
    p.add_argument("--x", help="comma-separated regressor columns kept in the output")

    p = sub.add_parser("fit-ls", parents=[common, data, transform_opts, tuning], help="SCAD least squares")
    p.add_argument("--x", required=True, help="comma-separated regressor columns")
    p.add_argument("--z", help="conditioning candidates (default: the regressors)")

    p = sub.add_parser("fit-gmm", parents=[common, data, transform_opts, tuning], help="SCAD-GMM moment selection")
    p.add_argument("--x", required=True, help="comma-separated regressor columns")
    p.add_argument("--known-valid", required=True, help="comma-separated known-valid instruments")
    p.add_argument("--candidates", required=True, help="comma-separated candidate instruments")
    p.add_argument("--weighting", choices=["identity", "two_step"], help="GMM weighting")

    p = sub.add_parser("probit", parents=[common, data], help="Probit baseline")
    p.add_argument("--x", required=True, help="comma-separated regressor columns")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo experiment")
    p.add_argument("--design", type=int, choices=range(1, 7), help="design id")
    p.add_argument("--n", type=int, help="sample size")
    p.add_argument("--p", dest="p_n", type=int, choices=[15, 30, 50], help="p_n")
    p.add_argument("--reps", type=int, help="replications")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--estimators", help="comma-separated subset of scad_ls, scad_gmm, probit, oracle")
    p.add_argument("--mad-center", choices=["median", "truth"], help="centre of the MAD column")
    p.add_argument("--full-scale", action="store_true", help=f"run {FULL_REPLICATIONS} replications")

    p = sub.add_parser("gen-design", parents=[common], help="write one draw of a design to CSV")
    p.add_argument("--design", type=int, required=True, choices=range(1, 7), help="design id")
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--p", dest="p_n", type=int, default=15, choices=[15, 30, 50], help="p_n")
    p.add_argument("--seed", type=int, default=7, help="base seed")
    p.add_argument("--stream", type=int, default=0, help="stream id")
    p.add_argument("--name", default="design", help="output file name without suffix")
    return parser


def _check_tuning_flags(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """
    Reject ``--a`` without ``--lambda`` and values of ``a`` outside ``(2, inf)``.
    """
    a = getattr(args, "a", None)
    if a is None:
        return
    if args.lam is None:
        parser.error("--a fixes the SCAD shape only together with --lambda")
    if not (np.isfinite(a) and a > 2):
        parser.error(f"--a must exceed 2, got {a}")


def _fixed_params(args: argparse.Namespace) -> ScadParams:
    return ScadParams(args.lam) if args.a is None else ScadParams(args.lam, args.a)


def _apply_config(args: argparse.Namespace) -> None:
    config.load_config(args.config)
    overrides: Dict[str, Any] = {"logging.logging_level": args.log_level, "output.dir": args.output}
    overrides["transform.p_tilde"] = getattr(args, "p_tilde", None)
    overrides["transform.kernel_order"] = getattr(args, "kernel_order", None)
    overrides["transform.density_floor"] = getattr(args, "floor", None)
    if args.command == "fit-ls":
        overrides["scad.folds"] = args.folds
    if args.command == "fit-gmm":
        overrides["gmm.folds"] = args.folds
        overrides["gmm.weighting"] = args.weighting
    if args.command == "simulate":
        for flag in ("design", "n", "p_n", "seed", "workers", "mad_center"):
            overrides[f"simulation.{flag}"] = getattr(args, flag)
        overrides["simulation.replications"] = args.reps
        overrides["simulation.estimators"] = _names(args.estimators) or None
        if args.full_scale:
            overrides["simulation.full_scale"] = True
    config.merge_overrides(overrides)


def transform_config(conditioning: Sequence[str] = (), seed: int = 0) -> TransformConfig:
    """
    :class:`TransformConfig` from the ``transform`` and ``optimizer`` sections.
    """
    settings = config.get_transform_config()
    return TransformConfig(
        p_tilde=int(settings["p_tilde"]),
        kernel_order=int(settings["kernel_order"]),
        density_floor=float(settings["density_floor"]),
        optimizer=OptimizerConfig(**config.get_optimizer_config()),
        seed=SeedSpec(seed),
        bandwidth_kernel_order=settings.get("bandwidth_kernel_order"),
        conditioning=tuple(conditioning),
    )


def pipeline_config(moment_selection: bool) -> PipelineConfig:
    """
    :class:`PipelineConfig` from the configuration; the ``gmm`` section for
    designs 4-6, the ``scad`` section otherwise.
    """
    settings = config.get_gmm_settings() if moment_selection else config.get_scad_settings()
    return PipelineConfig(
        transform=transform_config(),
        a_grid=tuple(settings["a_grid"]),
        lambda_grid_size=int(settings["lambda_grid_size"]),
        lambda_range=tuple(settings["lambda_range"]),
        folds=int(settings["folds"]),
        weighting=str(settings.get("weighting", "identity")),
    )


def _load(args: argparse.Namespace, regressors: Sequence[str] = (), instruments: Sequence[str] = ()) -> DataTable:
    roles: Dict[str, Role] = {args.y: Role.OUTCOME, args.v: Role.SPECIAL_REGRESSOR}
    roles.update({name: Role.INSTRUMENT for name in instruments})
    roles.update({name: Role.REGRESSOR for name in regressors})
    return load_csv(args.input, roles)


def _with_constant(table: DataTable) -> DataTable:
    if CONSTANT_COLUMN in table:
        return table
    return table.with_column(CONSTANT_COLUMN, np.ones(table.n_rows))


def cmd_screen(args: argparse.Namespace, reports: ReportService) -> None:
    z_names = _names(args.z)
    table = load_csv(args.input, {args.v: Role.SPECIAL_REGRESSOR})
    Z = table.matrix(z_names)
    if args.threshold is not None:
        report = screen_threshold(table.v, Z, args.threshold, names=z_names)
    else:
        top = args.top if args.top is not None else int(config.get_transform_config()["p_tilde"])
        report = screen_topk(table.v, Z, top, names=z_names)
    reports.save_table("screen", report.to_records())
    selected = ",".join(report.selected_names())
    reports.save_text("screen", {"n": report.n, "rule": report.rule.kind, "value": report.rule.value, "selected": selected})
    print(selected)


def cmd_density(args: argparse.Namespace, reports: ReportService) -> None:
    z_names = _names(args.z)
    table = load_csv(args.input, {args.v: Role.SPECIAL_REGRESSOR})
    sample = DensitySample(table.v, table.matrix(z_names), names=tuple(z_names))
    cfg = transform_config()
    model = select_bandwidths(sample, cfg.search_kernel, cfg.optimizer)
    order = args.kernel_order or cfg.kernel_order
    if model.kernel.order != order:
        model = model.with_kernel(KernelSpec(order))
    f_hat = model.cond_density_at(sample.v, sample.z)
    reports.save_table("density", [{"row": i, "f_hat": float(value)} for i, value in enumerate(f_hat)])
    reports.save_text("density", model.report())


def cmd_transform(args: argparse.Namespace, reports: ReportService) -> None:
    z_names, x_names = _names(args.z), _names(args.x)
    table = _load(args, regressors=x_names, instruments=[name for name in z_names if name not in x_names])
    result = transform(table, transform_config(z_names, args.seed))
    result.to_table().save_csv(reports.output_dir / "ytilde.csv")
    reports.save_text("transform", result.report())


def cmd_fit_ls(args: argparse.Namespace, reports: ReportService) -> None:
    x_names = _names(args.x)
    table = _load(args, regressors=x_names)
    result = transform(table, transform_config(_names(args.z) or x_names, args.seed))
    settings = config.get_scad_settings()
    intercept = bool(settings.get("intercept", True)) and not args.no_intercept
    names = ([CONSTANT_COLUMN] if intercept else []) + x_names
    X = table.matrix(x_names)
    if intercept:
        X = np.column_stack((np.ones(table.n_rows), X))
    unpenalized = (0,) if intercept else ()

    if args.lam is not None:
        fit = fit_scad_ls(X, result.y_tilde, _fixed_params(args), unpenalized=unpenalized)
    else:
        grid = default_lambda_grid(X, result.y_tilde, int(settings["lambda_grid_size"]), settings["lambda_range"])
        fit, cv_table = fit_scad_ls_cv(
            X, result.y_tilde, grid, settings["a_grid"], int(settings["folds"]), SeedSpec(args.seed, 1), unpenalized
        )
        reports.save_table("fit_cv", cv_table)
    reports.save_text("fit", fit.report(names), result.report())
    print(format_coefficients(names, fit.beta))


def cmd_fit_gmm(args: argparse.Namespace, reports: ReportService) -> None:
    x_names, known, candidates = _names(args.x), _names(args.known_valid), _names(args.candidates)
    if not known:
        raise UsageError("fit-gmm needs at least one --known-valid instrument")
    table = _load(args, regressors=x_names, instruments=known + candidates)
    settings = config.get_gmm_settings()
    result = transform(table, transform_config(known + candidates, args.seed))
    if bool(settings.get("intercept", True)) and not args.no_intercept:
        table = _with_constant(table)
        x_names = [CONSTANT_COLUMN] + [name for name in x_names if name != CONSTANT_COLUMN]
        known = [CONSTANT_COLUMN] + [name for name in known if name != CONSTANT_COLUMN]
    problem = GmmProblem.from_table(table, result.y_tilde, IvLayout(tuple(known), tuple(candidates), tuple(x_names)))

    if args.lam is not None:
        W = np.eye(problem.p_n)
        fit = fit_scad_gmm(problem, W, _fixed_params(args))
        fit = fit.with_sigma(sigma_hat(problem, fit, W))
    else:
        grid = default_gmm_lambda_grid(problem, int(settings["lambda_grid_size"]), settings["lambda_range"])
        fit, cv_table = fit_scad_gmm_cv(
            problem, str(settings["weighting"]), grid, settings["a_grid"], int(settings["folds"]), SeedSpec(args.seed, 1)
        )
        reports.save_table("fit_cv", cv_table)
    checks = kkt_validity_check(problem, fit)
    kkt_rows = [
        {
            "candidate": candidates[c.candidate],
            "eta": c.eta,
            "score": c.score,
            "passes": c.passes,
            "beyond_a_lambda": c.beyond_a_lambda,
        }
        for c in checks
    ]
    reports.save_table("kkt", kkt_rows)
    reports.save_text("fit", fit.report(problem.n), result.report())
    print(format_coefficients(x_names, fit.beta))
    print("invalid: " + ",".join(candidates[j] for j in fit.detected_invalid))


def cmd_probit(args: argparse.Namespace, reports: ReportService) -> None:
    x_names = _names(args.x)
    table = _load(args, regressors=x_names)
    fit = probit_fit(table, x_names)
    reports.save_text("probit", fit.report())
    print(f"gamma = {fit.gamma:.6g}")
    print(format_coefficients(list(fit.ratios), np.array(list(fit.ratios.values()))))


def cmd_simulate(args: argparse.Namespace, reports: ReportService) -> None:
    settings = config.get_simulation_settings()
    spec = DesignSpec(int(settings["design"]), int(settings["n"]), int(settings["p_n"]))
    replications = FULL_REPLICATIONS if settings.get("full_scale") else int(settings["replications"])
    report = run_replications(
        spec,
        estimators=settings.get("estimators"),
        replications=replications,
        cfg=pipeline_config(spec.is_moment_selection),
        seed=int(settings["seed"]),
        workers=int(settings["workers"]),
        mad_center=str(settings["mad_center"]),
    )
    reports.save_table("mc_report", report.metric_records())
    reports.save_table("mc_replications", report.records)
    tables = summarize_all(report)
    for table_id, frame in tables.items():
        reports.save_table(f"mc_table_{table_id}", frame)
        print(f"Layout {table_id}\n{format_table(frame)}\n")
    reports.save_text("mc_report", report.summary_record())


def cmd_gen_design(args: argparse.Namespace, reports: ReportService) -> None:
    spec = DesignSpec(args.design, args.n, args.p_n)
    table, truth = gen_design(spec, SeedSpec(args.seed, args.stream))
    path = table.save_csv(reports.output_dir / f"{args.name}.csv")
    reports.save_text(
        f"{args.name}_truth",
        {
            "design": spec.design,
            "n": spec.n,
            "p_n": spec.p_n,
            "seed": args.seed,
            "stream": args.stream,
            "beta": truth.beta,
            "relevant_to_v": ",".join(truth.relevant_to_v),
            "known_valid": ",".join(truth.known_valid),
            "valid": ",".join(truth.valid),
            "invalid": ",".join(truth.invalid),
        },
    )
    print(path)


def format_coefficients(names: Sequence[str], values: np.ndarray) -> str:
    width = max((len(name) for name in names), default=0)
    return "\n".join(f"{name:<{width}}  {value: .6f}" for name, value in zip(names, values))


HANDLERS = {
    "screen": cmd_screen,
    "density": cmd_density,
    "transform": cmd_transform,
    "fit-ls": cmd_fit_ls,
    "fit-gmm": cmd_fit_gmm,
    "probit": cmd_probit,
    "simulate": cmd_simulate,
    "gen-design": cmd_gen_design,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, run the command and return the exit code.

    Parameters
    ----------
    argv : Sequence[str], optional
        Arguments without the program name; ``sys.argv[1:]`` by default.

    Returns
    -------
    int
        0 on success, 1 on a data error, 2 on a numerical or usage error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_tuning_flags(parser, args)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        _apply_config(args)
        setup_global_logging(args.log_level)
        reports = ReportService(config.get_output_dir())
        HANDLERS[args.command](args, reports)
    except HdSpecRegError as e:
        logger.error("%s failed: %s", args.command, e)
        return exit_code_for(e)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
