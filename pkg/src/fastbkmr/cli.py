"""Command-line interface: ``fastbkmr {fit,predict,summarize,simulate,waic-scan}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure. Errors are reported on stderr as a single line
``fastbkmr: error[<kind>]: <message>``.

Wall-clock timings go to ``*.timing.json`` / ``*.timing.csv`` sidecar files so
that every other output is byte-identical across runs with the same seed.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import (
    CalibrationError,
    ConfigError,
    DataError,
    DensityError,
    DimensionMismatchError,
    DivergenceError,
    EmptyWindowError,
    FactorizationError,
    NumericalError,
)
from .io import (
    atomic_write_text,
    ingest_csv,
    load_config,
    read_exposures_csv,
    read_samples,
    write_samples,
    write_table,
)
from .posterior import (
    bivariate_surface,
    overall_effect,
    predict_h,
    summarize_draws,
    univariate_response,
    waic_components,
)
from .sampler import run_chain
from .simulation import ModelConfig, RESULT_COLUMNS, SimulationSpec, run_experiment

log = logging.getLogger("fastbkmr")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

_ERROR_KINDS = (
    ((ConfigError,), "config", EXIT_USAGE),
    ((DataError, EmptyWindowError, DimensionMismatchError), "data", EXIT_DATA),
    (
        (FactorizationError, DivergenceError, NumericalError, DensityError, CalibrationError, FloatingPointError),
        "numerical",
        EXIT_NUMERIC,
    ),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _add_run_options(p):
    p.add_argument("--config", help="flat JSON config file")
    p.add_argument("--seed", type=int, help="random seed (required unless set in the config)")
    p.add_argument("--J", type=int, help="number of frequency pairs")
    p.add_argument("--K", type=int, help="total MCMC iterations (even)")
    p.add_argument("--L", type=int, help="leapfrog steps per HMC update")
    p.add_argument("--e-beta", type=float, dest="e_beta")
    p.add_argument("--e-omega", type=float, dest="e_omega")
    p.add_argument("--e-t", type=float, dest="e_t")
    p.add_argument("--theta-update", choices=["conjugate", "verbatim"], dest="theta_update")


def _add_data_options(p):
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--outcome")
    p.add_argument("--exposures", type=lambda s: s.split(","), help="comma-separated exposure columns")
    p.add_argument("--confounders", type=lambda s: s.split(","), help="comma-separated confounder columns")
    p.add_argument("--no-standardize", action="store_true", help="keep exposures on their original scale")


def build_parser():
    parser = _Parser(prog="fastbkmr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="run the sampler and write a samples file")
    _add_run_options(p)
    _add_data_options(p)
    p.add_argument("--out", required=True, help="samples file to write")

    p = sub.add_parser("predict", help="evaluate the surface at new exposure profiles")
    p.add_argument("--samples", required=True)
    p.add_argument("--data", required=True, help="CSV holding the exposure columns")
    p.add_argument("--out", required=True)
    p.add_argument("--per-draw", action="store_true", help="write every draw instead of mean and interval")

    p = sub.add_parser("summarize", help="overall, univariate and bivariate summary tables")
    p.add_argument("--samples", required=True)
    p.add_argument("--config")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--grid-size", type=int, dest="grid_size")

    p = sub.add_parser("simulate", help="run a simulation study and write the results table")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=_int_list, default=[200])
    p.add_argument("--M", type=_int_list, default=[2])
    p.add_argument("--correlation", type=lambda s: s.split(","), default=["strong"])
    p.add_argument("--kernel", type=lambda s: s.split(","), default=["gaussian"])
    p.add_argument("--h-source", dest="h_source", default="gp", choices=["gp", "friedman"])
    p.add_argument("--holdout", type=float, default=0.0)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--J-list", type=_int_list, dest="J_list", help="comma-separated J values")
    p.add_argument("--K", type=int)
    p.add_argument("--oracle", action="store_true", help="also compute the exact-GP oracle RMSE")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("waic-scan", help="fit over several J and tabulate WAIC")
    _add_run_options(p)
    _add_data_options(p)
    p.add_argument("--J-list", type=_int_list, dest="J_list")
    p.add_argument("--out", required=True)
    return parser


def _resolve_config(args, require_seed):
    cfg = load_config(getattr(args, "config", None))
    overrides = {k: getattr(args, k, None) for k in ("seed", "J", "K", "L", "e_beta", "e_omega", "e_t", "theta_update", "J_list")}
    for key in ("outcome", "exposures", "confounders"):
        overrides[key] = getattr(args, key, None)
    if getattr(args, "no_standardize", False):
        overrides["standardize"] = False
    if getattr(args, "grid_size", None) is not None:
        overrides["grid_size"] = args.grid_size
    cfg = cfg.updated(**overrides)
    if require_seed and cfg.seed is None:
        raise ConfigError("a seed is required: pass --seed or set 'seed' in the config")
    return cfg


def _fit(data, cfg, J, seed):
    return run_chain(
        data, J, cfg.K, cfg.priors(), cfg.hmc(),
        theta0=None if cfg.theta0 is None else np.asarray(cfg.theta0, dtype=float),
        seed=seed, theta_update=cfg.theta_update,
    )


def _run_meta(samples):
    return {
        "accept_beta": samples.acceptance_rate("beta"),
        "accept_omega": samples.acceptance_rate("omega"),
        "final_e_beta": float(samples.step_beta[-1]),
        "final_e_omega": float(samples.step_omega[-1]),
        "divergences_beta": int(samples.diverged_beta.sum()),
        "divergences_omega": int(samples.diverged_omega.sum()),
        "warnings": list(samples.warnings),
    }


def cmd_fit(args):
    cfg = _resolve_config(args, require_seed=True)
    data, dropped = ingest_csv(args.data, cfg.columns(), standardize=cfg.standardize, return_dropped=True)
    t0 = time.perf_counter()
    samples = _fit(data, cfg, cfg.J, cfg.seed)
    seconds = time.perf_counter() - t0
    meta = {"config": json.loads(cfg.to_json()), "rows_dropped": dropped, **_run_meta(samples)}
    write_samples(args.out, samples, data, seed=cfg.seed, meta=meta)
    atomic_write_text(args.out + ".meta.json", json.dumps(meta, sort_keys=True, indent=2) + "\n")
    atomic_write_text(args.out + ".timing.json", json.dumps({"seconds": seconds}) + "\n")
    log.info("wrote %d draws to %s (%.1fs)", samples.n_draws, args.out, seconds)


def cmd_predict(args):
    samples, data, header = read_samples(args.samples)
    X_new, dropped = read_exposures_csv(args.data, header["exposure_names"], header["exposure_scale"])
    H = predict_h(samples, X_new)
    if args.per_draw:
        cols = ["row"] + [f"draw_{s}" for s in range(H.shape[1])]
        rows = [[i, *H[i]] for i in range(H.shape[0])]
    else:
        mean, lower, upper = summarize_draws(H, axis=1)
        cols = ["row", "mean", "lower", "upper"]
        rows = [[i, mean[i], lower[i], upper[i]] for i in range(H.shape[0])]
    write_table(args.out, cols, rows)


def cmd_summarize(args):
    cfg = _resolve_config(args, require_seed=False)
    samples, data, header = read_samples(args.samples)
    names = list(header["exposure_names"]) or [f"x{m}" for m in range(data.M)]
    os.makedirs(args.out_dir, exist_ok=True)
    X = data.X

    rows = []
    for p, p_ref in cfg.contrasts:
        e = overall_effect(samples, X, p, p_ref)
        rows.append([p, p_ref, e.point, e.lower, e.upper])
    for p in cfg.overall_percentiles:
        e = overall_effect(samples, X, p, cfg.p_ref)
        rows.append([p, cfg.p_ref, e.point, e.lower, e.upper])
    write_table(os.path.join(args.out_dir, "overall_effect.csv"), ["percentile", "reference", "point", "lower", "upper"], rows)

    rows = []
    for m, P in itertools.product(range(data.M), cfg.co_percentiles):
        try:
            curve = univariate_response(samples, X, m, P, cfg.grid_size, cfg.window)
        except EmptyWindowError as exc:
            log.warning("skipping %s at percentile %s: %s", names[m], P, exc)
            continue
        for x, e in zip(curve.grid, curve.estimates):
            rows.append([names[m], P, x, e.point, e.lower, e.upper])
    write_table(os.path.join(args.out_dir, "univariate.csv"), ["exposure", "co_percentile", "value", "point", "lower", "upper"], rows)

    rows = []
    for m1, m2 in itertools.combinations(range(data.M), 2):
        surf = bivariate_surface(samples, X, m1, m2, cfg.bivariate_fixed, cfg.grid_size, tuple(cfg.bivariate_range))
        for i, j in itertools.product(range(surf.grid1.shape[0]), range(surf.grid2.shape[0])):
            rows.append([names[m1], names[m2], surf.grid1[i], surf.grid2[j], surf.point[i, j], surf.lower[i, j], surf.upper[i, j]])
    write_table(
        os.path.join(args.out_dir, "bivariate.csv"),
        ["exposure1", "exposure2", "value1", "value2", "point", "lower", "upper"],
        rows,
    )


def cmd_simulate(args):
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise ConfigError("a seed is required: pass --seed or set 'seed' in the config")
    K = args.K if args.K is not None else cfg.K
    J_list = args.J_list or cfg.J_list
    cfg = cfg.updated(K=K)
    try:
        specs = [
            SimulationSpec(
                n=n, M=M, correlation=corr, kernel_kind=kern, h_source=args.h_source,
                holdout_fraction=args.holdout, replicates=args.replicates, seed=seed,
            )
            for n, M, corr, kern in itertools.product(args.n, args.M, args.correlation, args.kernel)
        ]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    configs = [ModelConfig(J=J, K=K, priors=cfg.priors(), hmc=cfg.hmc(), theta_update=cfg.theta_update) for J in J_list]
    rows = run_experiment(specs, configs, oracle=args.oracle, workers=args.workers)
    cols = [c for c in RESULT_COLUMNS if c != "seconds"]
    write_table(args.out, cols, rows)
    key = ["n", "M", "correlation", "kernel", "h_source", "holdout", "J", "K", "replicate"]
    write_table(args.out + ".timing.csv", key + ["seconds"], rows)


def cmd_waic_scan(args):
    cfg = _resolve_config(args, require_seed=True)
    data = ingest_csv(args.data, cfg.columns(), standardize=cfg.standardize)
    J_list = cfg.J_list
    results = []
    for J in J_list:
        samples = _fit(data, cfg, J, [cfg.seed, J])
        results.append((J, *waic_components(samples, data)))
    best = min(range(len(results)), key=lambda i: results[i][1])
    rows = [[J, w, lppd, p, int(i == best)] for i, (J, w, lppd, p) in enumerate(results)]
    write_table(args.out, ["J", "waic", "lppd", "p_waic", "selected"], rows)


COMMANDS = {
    "fit": cmd_fit,
    "predict": cmd_predict,
    "summarize": cmd_summarize,
    "simulate": cmd_simulate,
    "waic-scan": cmd_waic_scan,
}


def _report(kind, message, code):
    first = str(message).splitlines()[0] if str(message) else ""
    print(f"fastbkmr: error[{kind}]: {first}", file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _report("usage", exc, EXIT_USAGE)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        with np.errstate(over="ignore"):
            COMMANDS[args.command](args)
    except UsageError as exc:
        return _report("usage", exc, EXIT_USAGE)
    except Exception as exc:
        for types, kind, code in _ERROR_KINDS:
            if isinstance(exc, types):
                return _report(kind, exc, code)
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
