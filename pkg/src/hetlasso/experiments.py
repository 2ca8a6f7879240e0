"""Monte Carlo studies on the sparse AR-ARCH processes.

Three studies are available:

* inclusion: share of relevant / irrelevant candidate lags selected at every
  grid lambda and iteration, plus the points chosen by AIC, HQC and BIC;
* mae: one-step-ahead mean absolute forecast error per lambda and iteration,
  optionally for the oracle design restricted to the true lags;
* trend: how often the signs of the first true lags are recovered under an
  information criterion, as the sample size grows.

Every replication draws from its own stream ``(seed, replication)``, and
aggregation runs in replication order, so results do not depend on how many
worker processes are used. Each replication simulates ``n + max_lag`` points
(``+ 1`` for forecasting) so the regression always has exactly ``n`` rows.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .csvio import fmt
from .design import LagIndexSets, SeriesPanel, build_ar_design, restrict_design
from .exceptions import HetLassoError
from .irwal import GridSelection, IrwalConfig, irwal_fit, irwal_fixed_lambda_path
from .selection import CRITERIA
from .simulate import DgpSpec, ar_coefficients, simulate_path
from .volatility import VolatilitySpec
from .wlasso import default_lambda_grid

DESK_REPLICATIONS = 200
FULL_REPLICATIONS = 1000


def candidate_horizon(n: int) -> int:
    """Largest candidate lag, floor(5 sqrt(n))."""
    return math.isqrt(25 * n)


def default_vol_spec(dgp: DgpSpec) -> VolatilitySpec:
    lags = tuple(range(1, len(dgp.alpha) + 1))
    return VolatilitySpec(delta=1.0, lag_sets=LagIndexSets.univariate(lags),
                          threshold=dgp.vol_kind == "tarch")


@dataclass
class McReport:
    study: str
    n_reps: int
    n_failed: int
    config: dict
    rows: list[dict] = field(default_factory=list)
    curves: dict = field(default_factory=dict)   # (metric, n, k) -> array over the grid
    points: dict = field(default_factory=dict)   # (metric, criterion, n, k) or (metric, n) -> float
    checks: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["lambda", "k", "n", "metric", "value", "n_reps"])
            for row in self.rows:
                lam = row["lambda"]
                writer.writerow(["" if lam is None else fmt(lam), "" if row["k"] is None else row["k"],
                                 row["n"], row["metric"], fmt(row["value"]), row["n_reps"]])
        return path

    def write_manifest(self, path, extra: dict | None = None) -> Path:
        from . import __version__
        path = Path(path)
        manifest = {"study": self.study, "version": __version__, "n_reps": self.n_reps,
                    "n_failed": self.n_failed, "config": self.config, "checks": self.checks}
        manifest.update(extra or {})
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n")
        return path


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if isinstance(obj, LagIndexSets):
        return {f"{i},{j}": list(v) for (i, j), v in obj.to_dict().items()}
    return str(obj)


def _map_replications(worker: Callable[[int], object], N: int, threads: int) -> list:
    if threads <= 1 or N <= 1:
        return [worker(r) for r in range(N)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(N), chunksize=max(1, N // (4 * threads))))


def _guarded(fn, *args):
    try:
        return fn(*args)
    except (HetLassoError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return exc


def _simulate_design(dgp: DgpSpec, n: int, replication: int, extra: int = 0):
    horizon = candidate_horizon(n)
    y = simulate_path(replace(dgp, n=n + horizon + extra), replication)
    fit_part = y[:len(y) - extra] if extra else y
    design = build_ar_design(SeriesPanel(fit_part), 0, range(1, horizon + 1), include_intercept=False)
    return y, design


def _support_masks(dgp: DgpSpec, design):
    lags = np.array([c.lag for c in design.columns])
    support = set(ar_coefficients(dgp, int(lags.max())))
    rel = np.array([lag in support for lag in lags])
    return rel, ~rel


def _fixed_cfg(k_max: int, vol_spec: VolatilitySpec) -> IrwalConfig:
    return IrwalConfig(k_max=k_max, stop_epsilon=0.0, vol_spec=vol_spec)


# --- inclusion -------------------------------------------------------------

def _inclusion_rep(replication, dgp, n, grid, k_list, vol_spec, criteria):
    _, design = _simulate_design(dgp, n, replication)
    rel, irr = _support_masks(dgp, design)
    k_max = max(k_list)
    fits = irwal_fixed_lambda_path(design, grid, _fixed_cfg(k_max, vol_spec))
    props = np.zeros((2, len(grid), len(k_list)))
    for g, res in enumerate(fits):
        for c, k in enumerate(k_list):
            nz = res.records[k - 1].beta != 0
            props[0, g, c] = nz[rel].mean() if rel.any() else 0.0
            props[1, g, c] = nz[irr].mean() if irr.any() else 0.0
    ic = np.zeros((3, len(criteria), len(k_list)))   # relevant, irrelevant, log2 lambda
    nesting = []
    for c_idx, crit in enumerate(criteria):
        cfg = replace(_fixed_cfg(k_max, vol_spec),
                      lambda_policy=GridSelection(lambdas=tuple(grid), criterion=crit))
        res = irwal_fit(design, cfg=cfg)
        for c, k in enumerate(k_list):
            rec = res.records[k - 1]
            nz = rec.beta != 0
            ic[0, c_idx, c] = nz[rel].mean() if rel.any() else 0.0
            ic[1, c_idx, c] = nz[irr].mean() if irr.any() else 0.0
            ic[2, c_idx, c] = math.log2(rec.lam)
        for rec in res.records:
            rep = rec.selection
            nesting.append(tuple(rep.records[rep.chosen[name]].K for name in CRITERIA))
    return props, ic, nesting


def run_inclusion_study(dgp: DgpSpec, n_values: Sequence[int] = (600,), grid=None,
                        N: int = DESK_REPLICATIONS, k_list: Sequence[int] = (1, 2, 3),
                        criteria: Sequence[str] = CRITERIA, threads: int = 1,
                        vol_spec: VolatilitySpec | None = None) -> McReport:
    grid = default_lambda_grid() if grid is None else np.asarray(grid, dtype=float)
    k_list = sorted(set(int(k) for k in k_list))
    vol_spec = vol_spec or default_vol_spec(dgp)
    report = McReport("inclusion", N, 0, _config_echo(dgp, grid, N, k_list, n_values=list(n_values),
                                                      criteria=list(criteria)))
    nest_total, nest_bad = 0, 0
    for n in n_values:
        worker = partial(_guarded, _inclusion_rep_r, dgp, n, grid, tuple(k_list), vol_spec, tuple(criteria))
        outs = _map_replications(worker, N, threads)
        ok = [o for o in outs if not isinstance(o, Exception)]
        report.failures += [f"n={n} rep={r}: {o}" for r, o in enumerate(outs) if isinstance(o, Exception)]
        if not ok:
            continue
        props = np.mean([o[0] for o in ok], axis=0)
        ic = np.mean([o[1] for o in ok], axis=0)
        for o in ok:
            for K in o[2]:
                nest_total += 1
                nest_bad += not (K[2] <= K[1] <= K[0])
        for c, k in enumerate(k_list):
            for m, metric in enumerate(("relevant_inclusion", "irrelevant_inclusion")):
                report.curves[(metric, n, k)] = props[m, :, c]
                report.rows += [dict(**{"lambda": lam}, k=k, n=n, metric=metric, value=v, n_reps=len(ok))
                                for lam, v in zip(grid, props[m, :, c])]
            for ci, crit in enumerate(criteria):
                for m, metric in enumerate(("relevant_inclusion", "irrelevant_inclusion", "mean_log2_lambda")):
                    report.points[(metric, crit, n, k)] = float(ic[m, ci, c])
                    report.rows.append({"lambda": None, "k": k, "n": n, "metric": f"{crit}_{metric}",
                                        "value": float(ic[m, ci, c]), "n_reps": len(ok)})
    report.n_failed = len(report.failures)
    report.checks.update(ic_paths_checked=nest_total, ic_nesting_violations=nest_bad)
    return report


def _inclusion_rep_r(dgp, n, grid, k_list, vol_spec, criteria, replication):
    return _inclusion_rep(replication, dgp, n, grid, k_list, vol_spec, criteria)


# --- mae -------------------------------------------------------------------

def _mae_rep(dgp, n, grid, k_list, vol_spec, oracle, replication):
    y, design = _simulate_design(dgp, n, replication, extra=1)
    k_max = max(k_list)
    target = y[-1]
    out = {}
    designs = {"mae": design}
    if oracle:
        rel, _ = _support_masks(dgp, design)
        designs["mae_oracle"] = restrict_design(design, np.flatnonzero(rel))
    for metric, des in designs.items():
        row = des.lag_row(y[None, :], len(y) - 1)
        fits = irwal_fixed_lambda_path(des, grid, _fixed_cfg(k_max, vol_spec))
        err = np.empty((len(grid), len(k_list)))
        for g, res in enumerate(fits):
            for c, k in enumerate(k_list):
                err[g, c] = abs(row @ res.records[k - 1].beta - target)
        out[metric] = err
    return out


def run_mae_study(dgp: DgpSpec, n: int = 600, grid=None, N: int = DESK_REPLICATIONS,
                  k_list: Sequence[int] = (1, 2, 3, 4), oracle: bool = True, threads: int = 1,
                  vol_spec: VolatilitySpec | None = None) -> McReport:
    grid = default_lambda_grid() if grid is None else np.asarray(grid, dtype=float)
    k_list = sorted(set(int(k) for k in k_list))
    vol_spec = vol_spec or default_vol_spec(dgp)
    report = McReport("mae", N, 0, _config_echo(dgp, grid, N, k_list, n=n, oracle=oracle))
    worker = partial(_guarded, _mae_rep, dgp, n, grid, tuple(k_list), vol_spec, oracle)
    outs = _map_replications(worker, N, threads)
    ok = [o for o in outs if not isinstance(o, Exception)]
    report.failures = [f"rep={r}: {o}" for r, o in enumerate(outs) if isinstance(o, Exception)]
    report.n_failed = len(report.failures)
    if not ok:
        return report
    for metric in ok[0]:
        mae = np.mean([o[metric] for o in ok], axis=0)
        for c, k in enumerate(k_list):
            report.curves[(metric, n, k)] = mae[:, c]
            report.rows += [{"lambda": lam, "k": k, "n": n, "metric": metric, "value": v, "n_reps": len(ok)}
                            for lam, v in zip(grid, mae[:, c])]
    return report


# --- consistency trend -----------------------------------------------------

def _trend_rep(dgp, n, grid, criterion, k, vol_spec, n_signs, replication):
    _, design = _simulate_design(dgp, n, replication)
    cfg = replace(_fixed_cfg(k, vol_spec), lambda_policy=GridSelection(lambdas=tuple(grid), criterion=criterion))
    beta = irwal_fit(design, cfg=cfg).records[k - 1].beta
    coefs = ar_coefficients(dgp, design.max_lag)
    if not coefs:
        return bool(np.all(beta == 0))
    lags = sorted(coefs)[:n_signs]
    return all(np.sign(beta[design.column_index(0, lag)]) == np.sign(coefs[lag]) for lag in lags)


def run_consistency_trend(dgp: DgpSpec, n_values: Sequence[int] = (300, 600, 1200), criterion: str = "bic",
                          N: int = DESK_REPLICATIONS, k: int = 2, grid=None, n_signs: int = 3,
                          threads: int = 1, vol_spec: VolatilitySpec | None = None) -> McReport:
    """Share of replications whose first ``n_signs`` true lags get the right sign.

    For a DGP without AR terms, recovery means an empty active set.
    """
    n_values = list(n_values)
    if n_values != sorted(n_values):
        raise ValueError("n_values must be ascending")
    grid = default_lambda_grid() if grid is None else np.asarray(grid, dtype=float)
    vol_spec = vol_spec or default_vol_spec(dgp)
    report = McReport("trend", N, 0, _config_echo(dgp, grid, N, [k], n_values=n_values, criterion=criterion))
    fractions = []
    for n in n_values:
        worker = partial(_guarded, _trend_rep, dgp, n, grid, criterion, k, vol_spec, n_signs)
        outs = _map_replications(worker, N, threads)
        ok = [o for o in outs if not isinstance(o, Exception)]
        report.failures += [f"n={n} rep={r}: {o}" for r, o in enumerate(outs) if isinstance(o, Exception)]
        frac = float(np.mean(ok)) if ok else float("nan")
        fractions.append(frac)
        report.points[("sign_recovery", n)] = frac
        report.rows.append({"lambda": None, "k": k, "n": n, "metric": f"{criterion}_sign_recovery",
                            "value": frac, "n_reps": len(ok)})
    drops = [max(0.0, a - b) for a, b in zip(fractions, fractions[1:])]
    report.n_failed = len(report.failures)
    report.checks.update(fractions=fractions, inversions=sum(d > 0 for d in drops),
                         max_inversion=max(drops, default=0.0))
    return report


def _config_echo(dgp: DgpSpec, grid, N, k_list, **extra) -> dict:
    cfg = {"dgp": asdict(dgp), "grid_log2": [float(np.log2(g)) for g in (grid[0], grid[-1])],
           "grid_size": len(grid), "N": N, "k_list": list(k_list)}
    cfg.update(extra)
    return cfg


def default_threads() -> int:
    return os.cpu_count() or 1
