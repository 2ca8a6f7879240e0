"""Power-ARCH and zero-threshold TARCH conditional scales fitted from residuals.

The recursion regresses ``|e_t|^delta`` on an intercept and lagged
``|e_{j,t-k}|^delta`` (plus ``1{e_{j,t-k} < 0} |e_{j,t-k}|^delta`` when the
threshold terms are on). Its fitted values estimate ``gamma * sigma_t^delta``
with ``gamma = E|Z|^delta``, so the fitted scales are rescaled by one
constant such that the standardized residuals have unit mean square.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .design import LagIndexSets
from .exceptions import DegenerateScaleError, InsufficientDataError, InvalidInputError
from .nnls import NnlsSolution, solve_nnls

FLOOR_FRACTION = 1e-4


@dataclass(frozen=True)
class VolatilitySpec:
    delta: float = 1.0
    lag_sets: LagIndexSets = LagIndexSets.univariate((1, 2))
    threshold: bool = False
    sigma_floor: float | None = None  # None: FLOOR_FRACTION * rms(residuals)

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidInputError(f"delta must be positive, got {self.delta}")
        if self.sigma_floor is not None and not self.sigma_floor > 0:
            raise InvalidInputError("sigma_floor must be positive")
        if not isinstance(self.lag_sets, LagIndexSets):
            object.__setattr__(self, "lag_sets", LagIndexSets.univariate(self.lag_sets))

    def max_lag(self, target: int) -> int:
        return self.lag_sets.max_lag(target)


class ArchColumn(NamedTuple):
    source: int | None
    lag: int
    kind: str  # "intercept", "abs" or "neg"


def arch_columns(spec: VolatilitySpec, target: int, d: int) -> list[ArchColumn]:
    cols = [ArchColumn(None, 0, "intercept")]
    pairs = [(j, k) for j in range(d) for k in spec.lag_sets.get(target, j)]
    cols += [ArchColumn(j, k, "abs") for j, k in pairs]
    if spec.threshold:
        cols += [ArchColumn(j, k, "neg") for j, k in pairs]
    return cols


def _as_panel(residuals) -> np.ndarray:
    res = np.asarray(residuals, dtype=float)
    if res.ndim == 1:
        res = res[None, :]
    if res.ndim != 2:
        raise InvalidInputError("residuals must be a vector or a (d, n) matrix")
    return res


def _recursion_rows(res: np.ndarray, spec: VolatilitySpec, target: int, times) -> np.ndarray:
    """Recursion regressors for the given 0-based times (each needs max-lag history)."""
    times = np.asarray(times)
    d = res.shape[0]
    cols = arch_columns(spec, target, d)
    A = np.empty((times.size, len(cols)))
    A[:, 0] = 1.0
    powered = np.abs(res) ** spec.delta
    for c, col in enumerate(cols[1:], start=1):
        lagged = powered[col.source, times - col.lag]
        if col.kind == "neg":
            lagged = np.where(res[col.source, times - col.lag] < 0, lagged, 0.0)
        A[:, c] = lagged
    return A


def build_arch_design(residuals, spec: VolatilitySpec, target: int = 0):
    """Design ``A`` and response ``b = |e_target,t|^delta`` of the recursion.

    Rows start after the largest lag in the target's lag sets.
    """
    res = _as_panel(residuals)
    if not 0 <= target < res.shape[0]:
        raise InvalidInputError(f"target {target} outside 0..{res.shape[0] - 1}")
    q = spec.max_lag(target)
    n = res.shape[1]
    if n - q < 1:
        raise InsufficientDataError(f"{n} residuals cannot cover lag {q}")
    times = np.arange(q, n)
    A = _recursion_rows(res, spec, target, times)
    b = np.abs(res[target, q:]) ** spec.delta
    return A, b


@dataclass(frozen=True)
class VolatilityFit:
    alpha_tilde: NnlsSolution
    fitted_sigma: np.ndarray
    gamma_hat: float
    spec: VolatilitySpec
    target: int
    scale: float          # constant multiplying the raw recursion scale
    floor: float          # sigma floor actually applied
    aligned_start: int    # first time index covered by the recursion

    @property
    def alpha(self) -> np.ndarray:
        return self.alpha_tilde.alpha


def _normalizing_constant(eps, raw, floor):
    """c with mean((eps / max(c*raw, floor))^2) == 1."""
    e2 = eps * eps
    c0 = np.sqrt(np.mean(e2 / (raw * raw)))
    if c0 * raw.min() >= floor:
        return c0

    def excess(c):
        return np.mean(e2 / np.maximum(c * raw, floor) ** 2) - 1.0

    c_lo = floor / raw.max()
    if excess(c_lo) <= 0:
        raise DegenerateScaleError("sigma floor too large to normalize the residual scale")
    return brentq(excess, c_lo, c0, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def fit_volatility(residuals, spec: VolatilitySpec, target: int = 0) -> VolatilityFit:
    """Fit the recursion coefficients by NNLS and return normalized scales.

    Raw fitted powers ``A a`` are clamped below at ``floor^delta``; the first
    ``max_lag`` time points, which the recursion cannot cover, get the level
    ``mean(|e|^delta)^(1/delta)``. One constant then rescales everything so
    the standardized residuals have unit mean square, with the floor kept.
    """
    res = _as_panel(residuals)
    eps = res[target]
    rms = float(np.sqrt(np.mean(eps * eps)))
    if not np.isfinite(rms):
        raise InvalidInputError("residuals must be finite")
    if rms == 0.0:
        raise DegenerateScaleError(f"residuals of series {target} are all zero")
    floor = spec.sigma_floor if spec.sigma_floor is not None else FLOOR_FRACTION * rms
    delta = spec.delta

    A, b = build_arch_design(res, spec, target)
    sol = solve_nnls(A, b)
    q = spec.max_lag(target)
    raw = np.empty(eps.shape[0])
    raw[q:] = np.maximum(A @ sol.alpha, floor ** delta) ** (1.0 / delta)
    raw[:q] = max(float(np.mean(b)), floor ** delta) ** (1.0 / delta)

    c = _normalizing_constant(eps, raw, floor)
    fitted = np.maximum(c * raw, floor)
    gamma = float(np.mean(np.abs(eps[q:] / fitted[q:]) ** delta))
    fitted.setflags(write=False)
    return VolatilityFit(alpha_tilde=sol, fitted_sigma=fitted, gamma_hat=gamma, spec=spec,
                         target=target, scale=float(c), floor=float(floor), aligned_start=q)


def forecast_sigma(fit: VolatilityFit, recent_residuals, normalized: bool = True) -> float:
    """One-step-ahead scale after the last column of ``recent_residuals``.

    With ``normalized=False`` the bare recursion output ``(A a)^(1/delta)``
    is returned, without the floor or the normalizing constant.
    """
    res = _as_panel(recent_residuals)
    q = fit.spec.max_lag(fit.target)
    t = res.shape[1]
    if t < q:
        raise InsufficientDataError(f"need {q} recent residuals, got {t}")
    padded = np.concatenate([res, np.zeros((res.shape[0], 1))], axis=1)
    row = _recursion_rows(padded, fit.spec, fit.target, np.array([t]))[0]
    power = float(row @ fit.alpha)
    delta = fit.spec.delta
    if not normalized:
        return power ** (1.0 / delta)
    raw = max(power, fit.floor ** delta) ** (1.0 / delta)
    return max(fit.scale * raw, fit.floor)
