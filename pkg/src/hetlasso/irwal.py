"""Iteratively reweighted adaptive lasso.

Each iteration ``k`` fits the weighted lasso with observation weights
``w^[k-1]`` (all ones for ``k = 1``), fits the volatility recursion to the
residuals, and sets ``w^[k] = 1 / sigma^[k]``. The loop stops when
``||sigma^[k] - sigma^[k-1]|| < stop_epsilon`` or at ``k_max``.

Lambda scale. With ``lambda_scale="per-observation"`` (the default) a
nominal lambda is handed to the solver as ``2 * sum(w**2) * lambda``. That
matches a penalty on the per-observation loss ``sum(w^2 r^2) / (2 sum w^2)``,
so one lambda grid means the same thing for every iteration and sample
size. ``"raw"`` passes lambda through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .design import Design, LagIndexSets, SeriesPanel, build_ar_design, destandardize_coefficients
from .exceptions import HetLassoError, InvalidInputError, NumericFailureError
from .selection import CRITERIA, SelectionReport, criterion_name as _criterion_name, selection_report
from .volatility import VolatilityFit, VolatilitySpec, fit_volatility
from .wlasso import (
    DEFAULT_MAX_SWEEPS,
    DEFAULT_TOL,
    PenaltySpec,
    WeightedGram,
    WeightedLassoFit,
    lambda_max,
    lasso_path,
)

STOP_FRACTION = 1e-3
AUTO_GRID_OCTAVES = 14.0


@dataclass(frozen=True)
class FixedLambda:
    value: float


@dataclass(frozen=True)
class GridSelection:
    """Pick lambda on a grid by an information criterion, every iteration.

    ``lambdas=None`` builds a data-driven grid per iteration: ``num`` points
    from the smallest all-zero lambda down by ``octaves`` powers of two.
    """

    lambdas: tuple[float, ...] | None = None
    criterion: str | float = "bic"
    weighted: bool = True
    num: int = 100
    octaves: float = AUTO_GRID_OCTAVES


@dataclass(frozen=True)
class IrwalConfig:
    lambda_policy: FixedLambda | GridSelection = GridSelection()
    tau: float = 0.0
    beta_init_source: str = "auto"  # "none" | "ols" | "lasso"; "auto" -> lasso iff tau > 0
    vol_spec: VolatilitySpec = VolatilitySpec()
    k_max: int = 3
    stop_epsilon: float | None = None  # None: STOP_FRACTION * residual rms; 0: run k_max
    stop_norm: str = "max"
    lambda_scale: str = "per-observation"
    tol: float = DEFAULT_TOL
    max_sweeps: int = DEFAULT_MAX_SWEEPS

    def __post_init__(self):
        if self.k_max < 1:
            raise InvalidInputError("k_max must be >= 1")
        if self.stop_epsilon is not None and self.stop_epsilon < 0:
            raise InvalidInputError("stop_epsilon must be >= 0")
        if self.stop_norm not in ("max", "l2"):
            raise InvalidInputError(f"unknown stop norm {self.stop_norm!r}")
        if self.lambda_scale not in ("per-observation", "raw"):
            raise InvalidInputError(f"unknown lambda scale {self.lambda_scale!r}")
        if self.beta_init_source not in ("auto", "none", "ols", "lasso"):
            raise InvalidInputError(f"unknown beta_init source {self.beta_init_source!r}")
        if self.tau < 0:
            raise InvalidInputError("tau must be >= 0")
        if self.beta_init_source == "none" and self.tau > 0:
            raise InvalidInputError("tau > 0 needs an initial estimate")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    beta: np.ndarray           # standardized scale
    beta_orig: np.ndarray      # original data scale
    sigma_hat: np.ndarray
    weights: np.ndarray        # observation weights used by this iteration's lasso
    lam: float                 # nominal lambda (see module docstring)
    lam_solver: float          # lambda passed to the solver
    active_size: int
    objective: float
    converged: bool
    vol_fit: VolatilityFit = field(repr=False)
    selection: SelectionReport | None = field(default=None, repr=False)
    sigma_change: float = float("nan")


@dataclass(frozen=True)
class IrwalResult:
    records: list[IterationRecord]
    stopped_at: int
    stop_reason: str           # "epsilon-met" | "k_max"
    sigma0: float
    design: Design = field(repr=False)
    config: IrwalConfig = field(repr=False)

    @property
    def final_beta(self) -> np.ndarray:
        return self.records[-1].beta

    @property
    def final_beta_orig(self) -> np.ndarray:
        return self.records[-1].beta_orig

    @property
    def final_sigma(self) -> np.ndarray:
        return self.records[-1].sigma_hat

    @property
    def final_vol(self) -> VolatilityFit:
        return self.records[-1].vol_fit


def lambda_factor(w: np.ndarray, scale: str) -> float:
    return 2.0 * float(np.sum(w * w)) if scale == "per-observation" else 1.0


def _norm(x: np.ndarray, kind: str) -> float:
    return float(np.max(np.abs(x))) if kind == "max" else float(np.linalg.norm(x))


def auto_grid(design: Design, w, pen: PenaltySpec, scale: str, num: int = 100,
              octaves: float = AUTO_GRID_OCTAVES) -> np.ndarray:
    """Nominal lambdas from the smallest all-zero value down ``octaves`` halvings."""
    top = lambda_max(design, w, pen) / lambda_factor(np.asarray(w), scale)
    if top <= 0:
        top = 1.0
    return top * 2.0 ** -np.linspace(0.0, octaves, num)


def initial_estimate(design: Design, cfg: IrwalConfig) -> np.ndarray | None:
    source = cfg.beta_init_source
    if source == "auto":
        source = "lasso" if cfg.tau > 0 else "none"
    if source == "none":
        return None
    if source == "ols":
        if design.p >= design.n:
            raise InvalidInputError("OLS initial estimate needs p < n")
        return np.linalg.lstsq(design.X, design.y, rcond=None)[0]
    w = np.ones(design.n)
    pen = PenaltySpec.build(design, 0.0)
    policy = cfg.lambda_policy
    if isinstance(policy, GridSelection) and policy.lambdas is not None:
        nominal = np.asarray(policy.lambdas, dtype=float)
    else:
        nominal = auto_grid(design, w, pen, cfg.lambda_scale)
    lams = nominal * lambda_factor(w, cfg.lambda_scale)
    gram = WeightedGram(design, w)
    path = lasso_path(design, w, pen, lams, cfg.tol, cfg.max_sweeps, gram=gram)
    idx = selection_report(path, design, w, ["bic"]).chosen["bic"]
    return path[idx].beta


class IrwalRun:
    """Stepwise state of one IRWAL fit (lasso step, then volatility step)."""

    def __init__(self, design: Design, cfg: IrwalConfig, vol_target: int = 0,
                 beta_init: np.ndarray | None = None):
        self.design = design
        self.cfg = cfg
        self.vol_target = vol_target
        if beta_init is None and cfg.tau > 0:
            beta_init = initial_estimate(design, cfg)
        self.pen = PenaltySpec.build(design, 0.0, cfg.tau, beta_init)
        self.weights = np.ones(design.n)
        self.records: list[IterationRecord] = []
        self.sigma_prev: np.ndarray | None = None
        self.sigma0 = float("nan")
        self.stop_reason: str | None = None
        self._pending: tuple | None = None

    @property
    def k(self) -> int:
        return len(self.records) + 1

    @property
    def done(self) -> bool:
        return self.stop_reason is not None

    @property
    def pending_beta(self) -> np.ndarray:
        """Coefficients from the lasso step awaiting its volatility step."""
        if self._pending is None:
            raise RuntimeError("no lasso step pending")
        return self._pending[0].beta

    def lasso_step(self, fit: WeightedLassoFit | None = None, nominal: float | None = None,
                   selection: SelectionReport | None = None) -> np.ndarray:
        """Run step 2 and return the residuals ``y - X beta``.

        A precomputed ``fit`` (with its nominal lambda) may be supplied.
        """
        cfg, design, w = self.cfg, self.design, self.weights
        factor = lambda_factor(w, cfg.lambda_scale)
        if fit is None:
            policy = cfg.lambda_policy
            if isinstance(policy, FixedLambda):
                nominal = float(policy.value)
                warm = self.records[-1].beta if self.records else None
                fit = WeightedGram(design, w).solve(self.pen.with_lambda(nominal * factor), warm,
                                                    cfg.tol, cfg.max_sweeps)
            else:
                if policy.lambdas is not None:
                    grid = np.asarray(policy.lambdas, dtype=float)
                else:
                    grid = auto_grid(design, w, self.pen, cfg.lambda_scale, policy.num, policy.octaves)
                gram = WeightedGram(design, w)
                path = lasso_path(design, w, self.pen, grid * factor, cfg.tol, cfg.max_sweeps, gram=gram)
                crits = [policy.criterion] + [c for c in CRITERIA if c != _criterion_name(policy.criterion)]
                selection = selection_report(path, design, w, crits, policy.weighted)
                idx = selection.chosen[_criterion_name(policy.criterion)]
                fit, nominal = path[idx], float(grid[idx])
        if not np.all(np.isfinite(fit.beta)):
            raise NumericFailureError("non-finite lasso coefficients", iteration=self.k)
        resid = design.y - design.X @ fit.beta
        self._pending = (fit, float(nominal), selection)
        return resid

    def volatility_step(self, residual_panel: np.ndarray) -> None:
        """Run steps 3-5 given residuals of every series (rows aligned in time)."""
        if self._pending is None:
            raise RuntimeError("volatility_step called before lasso_step")
        fit, nominal, selection = self._pending
        self._pending = None
        cfg, k = self.cfg, self.k
        resid = np.asarray(residual_panel, dtype=float)
        if resid.ndim == 1:
            resid = resid[None, :]
        spec = cfg.vol_spec
        used = [self.vol_target] + [j for j in range(resid.shape[0])
                                    if spec.lag_sets.get(self.vol_target, j)]
        if not np.all(np.isfinite(resid[used])):
            raise NumericFailureError("non-finite residuals", iteration=k)
        vol = fit_volatility(resid, cfg.vol_spec, self.vol_target)
        sigma = np.asarray(vol.fitted_sigma)
        if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
            raise NumericFailureError("non-finite or non-positive volatility", iteration=k)

        if self.sigma_prev is None:
            own = resid[self.vol_target]
            self.sigma0 = float(np.sqrt(np.mean(own * own)))
            self.sigma_prev = np.full_like(sigma, self.sigma0)
        change = _norm(sigma - self.sigma_prev, cfg.stop_norm)

        self.records.append(IterationRecord(
            k=k,
            beta=fit.beta,
            beta_orig=destandardize_coefficients(fit.beta, self.design),
            sigma_hat=sigma,
            weights=self.weights,
            lam=nominal,
            lam_solver=fit.lam,
            active_size=int(np.count_nonzero(fit.beta[self.design.penalized])),
            objective=fit.objective,
            converged=fit.converged,
            vol_fit=vol,
            selection=selection,
            sigma_change=change,
        ))
        eps = cfg.stop_epsilon
        if eps is None:
            eps = STOP_FRACTION * self.sigma0
        if eps > 0 and change < eps:
            self.stop_reason = "epsilon-met"
        elif k >= cfg.k_max:
            self.stop_reason = "k_max"
        self.sigma_prev = sigma
        self.weights = 1.0 / sigma

    def result(self) -> IrwalResult:
        if not self.done:
            raise RuntimeError("IRWAL run has not stopped yet")
        return IrwalResult(self.records, len(self.records), self.stop_reason, self.sigma0,
                           self.design, self.cfg)


def _default_builder(design: Design) -> Callable[[np.ndarray], np.ndarray]:
    return lambda beta: (design.y - design.X @ beta)[None, :]


def irwal_fit(design: Design, residual_panel_builder: Callable[[np.ndarray], np.ndarray] | None = None,
              cfg: IrwalConfig = IrwalConfig(), vol_target: int | None = None) -> IrwalResult:
    """Run the reweighting loop on one design.

    ``residual_panel_builder`` maps standardized coefficients to a (d, n)
    residual panel feeding the volatility recursion; the default returns
    the design's own residuals as a single series.
    """
    builder = residual_panel_builder or _default_builder(design)
    if vol_target is None:
        vol_target = 0 if residual_panel_builder is None else design.target
    run = IrwalRun(design, cfg, vol_target)
    while not run.done:
        run.lasso_step()
        run.volatility_step(builder(run.pending_beta))
    return run.result()


def irwal_fixed_lambda_path(design: Design, lambdas: Sequence[float], cfg: IrwalConfig,
                            beta_init: np.ndarray | None = None) -> list[IrwalResult]:
    """One fixed-lambda IRWAL fit per nominal lambda (strictly descending).

    Identical to calling :func:`irwal_fit` with ``FixedLambda`` for each
    value, except that the first-iteration fits share one warm-started path.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    w = np.ones(design.n)
    if beta_init is None and cfg.tau > 0:
        beta_init = initial_estimate(design, cfg)
    pen = PenaltySpec.build(design, 0.0, cfg.tau, beta_init)
    first = lasso_path(design, w, pen, lambdas * lambda_factor(w, cfg.lambda_scale), cfg.tol,
                       cfg.max_sweeps)
    results = []
    for lam, fit in zip(lambdas, first):
        run = IrwalRun(design, _with_policy(cfg, FixedLambda(float(lam))), beta_init=beta_init)
        resid = run.lasso_step(fit, float(lam))
        run.volatility_step(resid)
        while not run.done:
            run.volatility_step(run.lasso_step())
        results.append(run.result())
    return results


def _with_policy(cfg: IrwalConfig, policy) -> IrwalConfig:
    return replace(cfg, lambda_policy=policy)


@dataclass(frozen=True)
class SeriesFailure:
    series: int
    error: Exception


def multivariate_fit(panel: SeriesPanel, mean_lags, cfg: IrwalConfig | Sequence[IrwalConfig],
                     include_intercept: bool = True) -> list[IrwalResult | SeriesFailure]:
    """Fit every series of ``panel`` on lags of all series.

    All designs share the same rows. Within an iteration, every series runs
    its lasso step before any volatility step, so cross-series ARCH terms see
    the current residuals of all series.
    """
    d = panel.d
    cfgs = list(cfg) if isinstance(cfg, Sequence) else [cfg] * d
    if len(cfgs) != d:
        raise InvalidInputError(f"{len(cfgs)} configs for {d} series")
    lag_sets = LagIndexSets.coerce(mean_lags, d)
    start = lag_sets.max_lag()
    results: list = [None] * d
    runs: list[IrwalRun | None] = [None] * d
    for i in range(d):
        try:
            design = build_ar_design(panel, i, lag_sets, include_intercept, start=start)
            runs[i] = IrwalRun(design, cfgs[i], vol_target=i)
        except HetLassoError as exc:
            results[i] = SeriesFailure(i, exc)

    n = max(panel.T - start, 0)
    last_resid = np.full((d, n), np.nan)
    while any(r is not None and not r.done for r in runs):
        stepping = []
        for i, run in enumerate(runs):
            if run is None or run.done:
                continue
            try:
                last_resid[i] = run.lasso_step()
                stepping.append(i)
            except HetLassoError as exc:
                results[i], runs[i] = SeriesFailure(i, exc), None
        for i in stepping:
            try:
                runs[i].volatility_step(last_resid)
            except HetLassoError as exc:
                results[i], runs[i] = SeriesFailure(i, exc), None
    for i, run in enumerate(runs):
        if run is not None:
            results[i] = run.result()
    return results
