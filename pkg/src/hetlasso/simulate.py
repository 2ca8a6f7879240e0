"""Sparse AR processes with ARCH / zero-threshold TARCH innovations.

Mean equation: ``Y_t = sum_k phi_k Y_{t-k} + e_t`` with ``phi_k`` nonzero only
at square lags, ``phi_k = mass * (1/phi - 1) * phi**sqrt(k)``.
Scale equation: ``sigma_t = a0 + sum_i (a_i + a_i^- 1{e_{t-i} < 0}) |e_{t-i}|``,
``e_t = sigma_t Z_t`` with standard normal ``Z_t``.

Random streams come from ``SeedSequence(seed, spawn_key=(replication,))``,
so replication ``r`` of a study draws the same numbers on any worker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numba import njit

from .exceptions import ExplosivePathError, InvalidInputError

GENERATION_HORIZON = 2500  # 50**2; later square-lag coefficients are dropped
DEFAULT_BURN_IN = 5000


@dataclass(frozen=True)
class DgpSpec:
    n: int = 600
    burn_in: int = DEFAULT_BURN_IN
    phi: float = 0.85
    mass: float = 0.95
    support: str | Mapping[int, float] = "squares"
    vol_kind: str = "arch"
    alpha0: float = 0.01
    alpha: tuple[float, ...] = (0.49, 0.49)
    alpha_neg: tuple[float, ...] = (0.0, 0.0)
    seed: int = 0
    horizon: int = GENERATION_HORIZON

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("n must be >= 1")
        if not 0 < self.phi < 1:
            raise InvalidInputError("phi must lie in (0, 1)")
        if self.vol_kind not in ("arch", "tarch"):
            raise InvalidInputError(f"unknown volatility kind {self.vol_kind!r}")
        if not self.alpha0 > 0 or min(self.alpha, default=0) < 0 or min(self.alpha_neg, default=0) < 0:
            raise InvalidInputError("need alpha0 > 0 and nonnegative ARCH coefficients")
        if len(self.alpha_neg) not in (0, len(self.alpha)):
            raise InvalidInputError("alpha_neg must match alpha in length")
        if self.vol_kind == "arch" and any(self.alpha_neg):
            raise InvalidInputError("an ARCH spec cannot carry leverage terms; use vol_kind='tarch'")
        if self.seed < 0:
            raise InvalidInputError("seed must be nonnegative")
        if not isinstance(self.support, str):
            object.__setattr__(self, "support", dict(self.support))
        elif self.support != "squares":
            raise InvalidInputError(f"unknown support rule {self.support!r}")

    @classmethod
    def arch(cls, n: int = 600, seed: int = 0, **kw) -> "DgpSpec":
        return cls(n=n, seed=seed, **kw)

    @classmethod
    def tarch(cls, n: int = 600, seed: int = 0, **kw) -> "DgpSpec":
        kw.setdefault("alpha", (0.245, 0.245))
        kw.setdefault("alpha_neg", (0.49, 0.49))
        return cls(n=n, seed=seed, vol_kind="tarch", **kw)

    def generation_lag(self) -> int:
        coefs = ar_coefficients(self, self.horizon)
        return max(coefs, default=0)


def ar_coefficients(spec: DgpSpec, max_lag: int) -> dict[int, float]:
    """Nonzero AR coefficients at lags ``<= max_lag``."""
    if max_lag < 1:
        raise InvalidInputError("max_lag must be >= 1")
    if not isinstance(spec.support, str):
        return {int(k): float(v) for k, v in sorted(spec.support.items()) if k <= max_lag and v != 0}
    if spec.mass == 0:
        return {}
    scale = spec.mass * (1.0 / spec.phi - 1.0)
    out = {}
    for m in range(1, math.isqrt(max_lag) + 1):
        out[m * m] = scale * spec.phi ** m
    return out


def true_support(spec: DgpSpec, max_lag: int) -> list[int]:
    return sorted(ar_coefficients(spec, max_lag))


def rng_for(seed: int, replication: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replication,))))


@njit(cache=True)
def _generate(z, lags, coefs, a0, a, a_neg):
    T = z.shape[0]
    y = np.zeros(T)
    e = np.zeros(T)
    s = np.zeros(T)
    for t in range(T):
        sig = a0
        for i in range(a.shape[0]):
            if t - 1 - i >= 0:
                prev = e[t - 1 - i]
                sig += a[i] * abs(prev)
                if prev < 0.0:
                    sig -= a_neg[i] * prev
        e[t] = sig * z[t]
        s[t] = sig
        acc = e[t]
        for m in range(lags.shape[0]):
            k = lags[m]
            if t - k >= 0:
                acc += coefs[m] * y[t - k]
        y[t] = acc
        if not np.isfinite(acc):
            return y, e, s, t
    return y, e, s, -1


@dataclass(frozen=True)
class SimulatedPath:
    y: np.ndarray
    eps: np.ndarray
    sigma: np.ndarray


def simulate_full(spec: DgpSpec, replication: int = 0) -> SimulatedPath:
    coefs = ar_coefficients(spec, spec.horizon)
    gen_lag = max(coefs, default=0)
    if spec.burn_in < 2 * gen_lag:
        raise InvalidInputError(f"burn_in {spec.burn_in} below twice the largest generated lag {gen_lag}")
    rng = rng_for(spec.seed, replication)
    z = rng.standard_normal(spec.burn_in + spec.n)
    lags = np.array(list(coefs), dtype=np.int64)
    vals = np.array(list(coefs.values()), dtype=float)
    a = np.asarray(spec.alpha, dtype=float)
    a_neg = np.asarray(spec.alpha_neg, dtype=float) if spec.alpha_neg else np.zeros_like(a)
    y, e, s, bad = _generate(z, lags, vals, float(spec.alpha0), a, a_neg)
    if bad >= 0:
        raise ExplosivePathError(int(bad) - spec.burn_in)
    cut = spec.burn_in
    return SimulatedPath(y[cut:].copy(), e[cut:].copy(), s[cut:].copy())


def simulate_path(spec: DgpSpec, replication: int = 0) -> np.ndarray:
    """The ``n`` values after burn-in; deterministic in (seed, replication)."""
    return simulate_full(spec, replication).y
