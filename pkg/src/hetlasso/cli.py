"""Command-line front end.

    hetlasso fit --input data.csv --out results/
    hetlasso simulate --n 600 --seed 7 --out sim/
    hetlasso bench-inclusion | bench-mae | bench-trend [--N 200] [--threads 8]

Every command also writes ``run.cfg`` (the effective configuration) into the
output directory, so a run can be repeated with ``--config out/run.cfg``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import traceback
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, ConfigError, RunConfig, dump_config, load_config, parse_value
from .csvio import fmt, read_panel_csv, write_panel_csv
from .design import LagIndexSets, SeriesPanel
from .exceptions import HetLassoError
from .experiments import run_consistency_trend, run_inclusion_study, run_mae_study
from .irwal import GridSelection, IrwalConfig, IrwalResult, SeriesFailure, multivariate_fit
from .simulate import DgpSpec, simulate_path
from .volatility import VolatilitySpec, arch_columns
from .wlasso import default_lambda_grid

log = logging.getLogger("hetlasso")


def _grid(cfg: RunConfig) -> np.ndarray:
    return default_lambda_grid(cfg.lambda_num or 100, cfg.lambda_log2_hi, cfg.lambda_log2_lo)


def _threads(cfg: RunConfig) -> int:
    return cfg.threads or os.cpu_count() or 1


def _dgp(cfg: RunConfig, n: int | None = None) -> DgpSpec:
    maker = DgpSpec.tarch if cfg.dgp == "tarch" else DgpSpec.arch
    return maker(n=n or cfg.n, seed=cfg.seed, burn_in=cfg.burn_in)


def irwal_config(cfg: RunConfig, d: int) -> IrwalConfig:
    lambdas = None if cfg.lambda_num is None else tuple(_grid(cfg))
    vol = VolatilitySpec(delta=cfg.delta, lag_sets=LagIndexSets.uniform(d, cfg.vol_lags),
                         threshold=cfg.threshold)
    return IrwalConfig(lambda_policy=GridSelection(lambdas=lambdas, criterion=cfg.criterion,
                                                   weighted=cfg.weighted_ic),
                       tau=cfg.tau, beta_init_source=cfg.beta_init, vol_spec=vol, k_max=cfg.k_max,
                       stop_epsilon=cfg.stop_epsilon, lambda_scale=cfg.lambda_scale)


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _series_summary(res: IrwalResult, names) -> dict:
    iterations = []
    for rec in res.records:
        entry = {"k": rec.k, "lambda": rec.lam, "lambda_solver": rec.lam_solver,
                 "active_count": rec.active_size, "sigma_change": rec.sigma_change,
                 "lasso_converged": rec.converged, "gamma_hat": rec.vol_fit.gamma_hat}
        if rec.selection is not None:
            chosen = rec.selection.records[rec.selection.chosen[res.config.lambda_policy.criterion.lower()]]
            entry["ic"] = chosen.gic
            entry["sigma2_hat"] = chosen.sigma2_hat
        iterations.append(entry)
    return {"status": "ok", "iterations": iterations, "n_iterations": len(res.records),
            "stop_reason": res.stop_reason, "sigma0": res.sigma0,
            "active_count": res.records[-1].active_size}


def cmd_fit(cfg: RunConfig) -> int:
    if cfg.input is None:
        raise ConfigError("fit needs an input CSV (--input or 'input =' in the config)")
    panel = read_panel_csv(cfg.input)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    names = panel.series_names
    icfg = irwal_config(cfg, panel.d)
    results = multivariate_fit(panel, LagIndexSets.uniform(panel.d, cfg.mean_lags), icfg,
                               include_intercept=cfg.intercept)

    coef_rows, vol_rows, summary = [], [], {}
    sigma_cols: dict[str, np.ndarray] = {}
    start = None
    for i, res in enumerate(results):
        name = names[i]
        if isinstance(res, SeriesFailure):
            summary[name] = {"status": "failed", "error": f"{type(res.error).__name__}: {res.error}"}
            log.error("series %s failed: %s", name, res.error)
            continue
        design = res.design
        start = design.start
        beta = res.final_beta_orig
        for col, b in zip(design.columns, beta):
            src = "(intercept)" if col.is_intercept else names[col.source]
            coef_rows.append([name, src, col.lag, fmt(b), int(b != 0)])
        vol = res.final_vol
        for col, a in zip(arch_columns(vol.spec, i, panel.d), vol.alpha):
            src = "" if col.source is None else names[col.source]
            vol_rows.append([name, col.kind, src, col.lag, fmt(a)])
        vol_rows.append([name, "scale", "", 0, fmt(vol.scale)])
        vol_rows.append([name, "gamma_hat", "", 0, fmt(vol.gamma_hat)])
        sigma_cols[name] = res.final_sigma
        summary[name] = _series_summary(res, names)

    _write_rows(out / "coefficients.csv", ["series", "source", "lag", "coefficient", "included"], coef_rows)
    _write_rows(out / "volatility.csv", ["series", "term", "source", "lag", "coefficient"], vol_rows)
    if sigma_cols:
        T = len(next(iter(sigma_cols.values())))
        _write_rows(out / "sigma.csv", ["t"] + list(sigma_cols),
                    [[start + t] + [fmt(s[t]) for s in sigma_cols.values()] for t in range(T)])
    _write_json(out / "summary.json", {"version": __version__, "input": str(cfg.input),
                                        "n_series": panel.d, "T": panel.T, "series": summary})
    _write_cfg(out, cfg)
    failed = [n for n, s in summary.items() if s["status"] != "ok"]
    for name, s in summary.items():
        if s["status"] == "ok":
            log.info("%s: %d active lags after %d iterations (%s)", name, s["active_count"],
                     s["n_iterations"], s["stop_reason"])
    return 1 if failed else 0


def cmd_simulate(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    y = simulate_path(_dgp(cfg))
    path = write_panel_csv(SeriesPanel(y, ("y",)), out / "simulated.csv")
    _write_cfg(out, cfg)
    return path


def _bench(cfg: RunConfig, report) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / f"{report.study}.csv")
    report.write_manifest(out / f"{report.study}_manifest.json", {"seed": cfg.seed})
    _write_cfg(out, cfg)
    for msg in report.failures:
        log.warning("replication failed: %s", msg)
    log.info("%s: %d replications, %d failed", report.study, report.n_reps, report.n_failed)
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    common = dict(grid=_grid(cfg), N=cfg.replications, threads=_threads(cfg))
    vol = VolatilitySpec(delta=cfg.delta, lag_sets=LagIndexSets.univariate(cfg.vol_lags),
                         threshold=cfg.threshold or cfg.dgp == "tarch")
    if cfg.command == "bench-inclusion":
        report = run_inclusion_study(_dgp(cfg), cfg.n_values, k_list=cfg.k_list, vol_spec=vol, **common)
    elif cfg.command == "bench-mae":
        report = run_mae_study(_dgp(cfg), cfg.n, k_list=cfg.k_list, oracle=cfg.oracle, vol_spec=vol, **common)
    else:
        k = cfg.k_list[0] if len(cfg.k_list) == 1 else 2
        report = run_consistency_trend(_dgp(cfg), cfg.n_values, cfg.criterion, k=k, vol_spec=vol, **common)
    return _bench(cfg, report)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n")


def _write_cfg(out: Path, cfg: RunConfig) -> None:
    if cfg.input is not None:
        cfg = replace(cfg, input=str(Path(cfg.input).resolve()))
    (out / "run.cfg").write_text(dump_config(cfg))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetlasso", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--threads", type=int)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "fit":
            p.add_argument("--input", metavar="CSV")
            p.add_argument("--mean-lags", metavar="LIST", help="e.g. 1..700")
            p.add_argument("--vol-lags", metavar="LIST")
            p.add_argument("--criterion", choices=("aic", "hqc", "bic"))
            p.add_argument("--k-max", type=int)
            p.add_argument("--tau", type=float)
        else:
            p.add_argument("--n", type=int)
            p.add_argument("--tarch", action="store_const", const="tarch", dest="dgp")
        if name.startswith("bench"):
            p.add_argument("--N", type=int, dest="N")
            p.add_argument("--full-scale", action="store_true", default=None)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    over = {"command": args.command}
    for key in ("seed", "out", "threads", "input", "criterion", "k_max", "tau", "n", "dgp", "N", "full_scale"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = val
    for key in ("mean_lags", "vol_lags"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = parse_value(key, val)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        over[key.strip()] = parse_value(key.strip(), val)
    return over


def _provenance(exc: BaseException) -> str:
    """Module of the innermost package frame that raised ``exc``."""
    where = "hetlasso"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        mod = frame.f_globals.get("__name__", "")
        if mod.startswith("hetlasso.") and mod != "hetlasso.exceptions":
            where = mod
    return where


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, _overrides(args))
        if cfg.command == "fit":
            return cmd_fit(cfg)
        if cfg.command == "simulate":
            print(cmd_simulate(cfg))
            return 0
        return cmd_bench(cfg)
    except HetLassoError as exc:
        print(f"hetlasso: error [{_provenance(exc)}: {type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hetlasso: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
