"""Command-line interface.

Subcommands: fit (full pipeline on a CSV), calibrate (single level lookup),
table (calibration grid as CSV), simulate (coverage study from a JSON
scenario), limitcheck (Monte-Carlo verification of the limiting coverage).
Worker count comes from --threads, falling back to the SPARSEPROJ_THREADS
environment variable, then to 1.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .calibration import (CalibrationQuery, calibration_table_csv,
                          display_level, solve_gamma, TABLE_LAMBDAS,
                          TABLE_TARGETS)
from .dataio import dataset_from_csv
from .errors import SparseProjError
from .limits import LimitSpec, limitcheck_rows
from .posterior import factorize, sample_posterior_arrays
from .projection import cross_validate_lambda, fit_lasso, project_draws
from .regions import ProjectedSample, component_interval, model_probabilities
from .simulate import (Scenario, report_to_csv, run_scenario, signal_vector,
                       sparsity_sweep, sweep_to_csv)
from .types import PriorConfig, validate_dataset

log = logging.getLogger("sparseproj")

SCHEMA_VERSION = 1


def _thread_default() -> int:
    try:
        return max(1, int(os.environ.get("SPARSEPROJ_THREADS", "1")))
    except ValueError:
        return 1


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_lambda(value: str) -> float | str:
    if value == "auto":
        return "auto"
    try:
        lam = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--lambda must be 'auto' or a number, got {value!r}")
    if lam <= 0:
        raise argparse.ArgumentTypeError("--lambda must be positive")
    return lam


def _float_list(value: str) -> list[float]:
    try:
        return [float(tok) for tok in value.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def cmd_fit(args) -> int:
    ds, names = dataset_from_csv(args.data, args.response, standardize=args.standardize)
    prior = PriorConfig(a_n=args.an)

    state = np.random.SeedSequence((int(args.seed), 0xF17)).generate_state(2)
    cv_seed, post_seed = int(state[0]), int(state[1])

    if args.lambda_n == "auto":
        # half the CV minimizer: the penalty is taken on the classical
        # (2n)-normalized LASSO scale (see the same rule in the harness)
        lam = 0.5 * cross_validate_lambda(ds, seed=cv_seed)
    else:
        lam = float(args.lambda_n)
    lam0 = lam * math.sqrt(ds.n)

    fact = factorize(ds, prior)
    center = fit_lasso(ds, lam)
    resid = ds.Y - ds.X @ fact.ridge_mean
    sigma_hat = math.sqrt(float(resid @ resid) / ds.n)

    if args.target is not None:
        levels = [solve_gamma(CalibrationQuery(lambda0=lam0, target=args.target,
                                               c_j=float(ds.gram[j, j]),
                                               sigma0=sigma_hat)).gamma_level
                  for j in range(ds.p)]
    else:
        levels = [args.level] * ds.p

    thetas, _ = sample_posterior_arrays(fact, args.draws, post_seed)
    U, kkt = project_draws(ds, thetas, lam, warm=center)
    sample = ProjectedSample(draws=U, center=center, n=ds.n, level=levels[0])

    import warnings
    intervals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for j in range(ds.p):
            lo, hi = component_interval(sample, j, level=levels[j])
            intervals.append({"name": names[j], "level": levels[j],
                              "estimate": float(center[j]), "lo": lo, "hi": hi})

    probs = model_probabilities(sample)
    model_probs = {",".join(str(j) for j in sorted(s)): f for s, f in
                   sorted(probs.items(), key=lambda kv: -kv[1])}

    max_kkt = float(kkt.max())
    log.info("fit: seed=%d lambda_n=%.6g lambda0=%.6g level=%s max_kkt=%.3e",
             args.seed, lam, lam0, ",".join(f"{lv:.4f}" for lv in levels[:5]), max_kkt)

    out = {
        "schema": SCHEMA_VERSION,
        "n": ds.n,
        "p": ds.p,
        "seed": args.seed,
        "lambda_n": lam,
        "lambda0": lam0,
        "sigma_hat": sigma_hat,
        "target": args.target,
        "intervals": intervals,
        "model_probabilities": model_probs,
        "diagnostics": {"max_kkt_residual": max_kkt, "draws": args.draws},
    }
    _write_text(args.out, json.dumps(out, indent=2) + "\n")
    return 0


def cmd_calibrate(args) -> int:
    res = solve_gamma(CalibrationQuery(lambda0=args.lambda0, target=args.target,
                                       c_j=args.c, sigma0=args.sigma0))
    log.info("calibrate: lambda0=%.6g target=%.6g level=%.6f psi0=%.6f",
             args.lambda0, args.target, res.gamma_level, res.psi0_at_gamma)
    print(display_level(res.gamma_level))
    return 0


def cmd_table(args) -> int:
    lambdas = args.lambdas if args.lambdas else TABLE_LAMBDAS
    targets = args.targets if args.targets else TABLE_TARGETS
    log.info("table: %d lambdas x %d targets", len(lambdas), len(targets))
    _write_text(args.out, calibration_table_csv(lambdas, targets))
    return 0


def cmd_simulate(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    sweep = cfg.pop("sweep", None)
    if "theta0" not in cfg:
        variant = cfg.pop("signals", "default")
        cfg["theta0"] = signal_vector(cfg["p"], caption_variant=(variant == "caption"))
    scenario = Scenario(**cfg)
    log.info("simulate: design=%s n=%d p=%d reps=%d draws=%d seed=%d threads=%d",
             scenario.design, scenario.n, scenario.p, scenario.replications,
             scenario.draws_per_rep, scenario.seed, args.threads)
    if sweep:
        s_values = [int(s) for s in sweep["s_values"]]
        reports = sparsity_sweep(scenario, s_values, workers=args.threads)
        _write_text(args.out, sweep_to_csv(reports, scenario, s_values))
    else:
        report = run_scenario(scenario, workers=args.threads)
        log.info("simulate: seed=%d mean_lambda_n=%.6g mean_lambda0=%.6g "
                 "mean_level=%.6f max_kkt=%.3e runtime=%.1fs",
                 scenario.seed, report.mean_lambda_n, report.mean_lambda0,
                 report.mean_level, report.max_kkt, report.runtime)
        _write_text(args.out, report_to_csv(report, scenario))
    return 0


def cmd_limitcheck(args) -> int:
    signs = np.asarray(args.signs, dtype=float)
    p = signs.shape[0]

    def build(lam):
        return LimitSpec(C=np.eye(p), sigma0=args.sigma0, lambda0=lam,
                         theta0_signs=signs)

    log.info("limitcheck: lambdas=%s target=%g outer=%d inner=%d seed=%d threads=%d",
             args.lambda0, args.target, args.outer, args.inner, args.seed, args.threads)
    rows = limitcheck_rows(build, args.lambda0, args.target, args.outer,
                           args.inner, args.seed, workers=args.threads)
    lines = ["lambda0,coordinate,role,level,estimate,mc_se,analytic"]
    for r in rows:
        lines.append(f"{r['lambda0']:g},{r['coordinate']},{r['role']},"
                     f"{r['level']:.10g},{r['estimate']:.10g},"
                     f"{r['mc_se']:.10g},{r['analytic']:.10g}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseproj",
        description="Sparse projection-posterior inference for linear regression.")
    parser.add_argument("--threads", type=int, default=_thread_default(),
                        help="worker count (default: SPARSEPROJ_THREADS or 1)")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress details to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a CSV dataset and write interval JSON")
    p_fit.add_argument("--data", required=True, help="input CSV with header row")
    p_fit.add_argument("--response", required=True, help="name of the response column")
    group = p_fit.add_mutually_exclusive_group(required=True)
    group.add_argument("--level", type=float, help="credibility level used directly")
    group.add_argument("--target", type=float,
                       help="intended asymptotic coverage; level is calibrated from it")
    p_fit.add_argument("--lambda", dest="lambda_n", type=_parse_lambda, default="auto",
                       help="projection penalty, or 'auto' for cross-validation")
    p_fit.add_argument("--an", type=float, default=1.0, help="prior precision a_n")
    p_fit.add_argument("--draws", type=int, default=2000, help="posterior draw count")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--standardize", action="store_true",
                       help="center and scale predictor columns")
    p_fit.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p_fit.set_defaults(func=cmd_fit)

    p_cal = sub.add_parser("calibrate", help="print the calibrated credibility level")
    p_cal.add_argument("--lambda0", type=float, required=True)
    p_cal.add_argument("--target", type=float, required=True)
    p_cal.add_argument("--c", type=float, default=1.0, help="limiting Gram diagonal")
    p_cal.add_argument("--sigma0", type=float, default=1.0, help="error s.d.")
    p_cal.set_defaults(func=cmd_calibrate)

    p_tab = sub.add_parser("table", help="emit the calibration table as CSV")
    p_tab.add_argument("--lambdas", type=_float_list, default=None,
                       help="comma-separated penalties (default: reference grid)")
    p_tab.add_argument("--targets", type=_float_list, default=None,
                       help="comma-separated coverage targets")
    p_tab.add_argument("--out", default=None)
    p_tab.set_defaults(func=cmd_table)

    p_sim = sub.add_parser("simulate", help="run a coverage study from a JSON scenario")
    p_sim.add_argument("--config", required=True, help="scenario JSON path")
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_lim = sub.add_parser("limitcheck",
                           help="Monte-Carlo check of the limiting coverage")
    p_lim.add_argument("--lambda0", type=_float_list, default=[0.5, 1.0, 2.0],
                       help="comma-separated penalty values")
    p_lim.add_argument("--target", type=float, default=0.95)
    p_lim.add_argument("--signs", type=_float_list, default=[1.0, -1.0, 0.0],
                       help="true-sign pattern, e.g. '1,-1,0' (0 = noise)")
    p_lim.add_argument("--sigma0", type=float, default=1.0)
    p_lim.add_argument("--outer", type=int, default=2000)
    p_lim.add_argument("--inner", type=int, default=2000)
    p_lim.add_argument("--seed", type=int, default=0)
    p_lim.add_argument("--out", default=None)
    p_lim.set_defaults(func=cmd_limitcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (SparseProjError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"sparseproj: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
