"""Generalised information criteria along a lasso path.

``GIC(kappa) = log(sigma2) + kappa * K / n`` where ``K`` counts nonzero
penalized coefficients and ``sigma2`` is the mean squared (by default
weighted) residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .design import Design
from .exceptions import InfiniteCriterionError, InvalidInputError
from .wlasso import WeightedLassoFit

CRITERIA = ("aic", "hqc", "bic")


def kappa_for(criterion: str | float, n: int) -> float:
    if not isinstance(criterion, str):
        return float(criterion)
    name = criterion.lower()
    if name == "aic":
        return 2.0
    if name == "hqc":
        return 2.0 * math.log(math.log(n))
    if name == "bic":
        return math.log(n)
    raise InvalidInputError(f"unknown information criterion {criterion!r}")


def criterion_name(criterion: str | float) -> str:
    return criterion.lower() if isinstance(criterion, str) else f"kappa={criterion:g}"


def _sigma2(design: Design, w, betas: np.ndarray, weighted: bool) -> np.ndarray:
    R = design.y[:, None] - design.X @ betas.T
    if weighted:
        R = R * np.asarray(w, dtype=float)[:, None]
    return np.mean(R * R, axis=0)


def _counts(design: Design, betas: np.ndarray) -> np.ndarray:
    return np.count_nonzero(betas[:, design.penalized], axis=1)


def evaluate_gic(fit: WeightedLassoFit, design: Design, w, kappa: float | str,
                 weighted: bool = True) -> float:
    kappa = kappa_for(kappa, design.n)
    beta = np.asarray(fit.beta)[None, :]
    s2 = float(_sigma2(design, w, beta, weighted)[0])
    if s2 <= 0.0:
        raise InfiniteCriterionError("zero residual variance: GIC is -inf")
    K = int(_counts(design, beta)[0])
    return math.log(s2) + kappa * K / design.n


@dataclass(frozen=True)
class SelectionRecord:
    lam: float
    K: int
    sigma2_hat: float
    gic: dict[str, float]


@dataclass(frozen=True)
class SelectionReport:
    records: list[SelectionRecord]
    chosen: dict[str, int]


def _argmin_prefer_sparse(values: np.ndarray, lams: np.ndarray) -> int:
    best = values.min()
    ties = np.flatnonzero(values == best)
    return int(ties[np.argmax(lams[ties])])


def selection_report(path: Sequence[WeightedLassoFit], design: Design, w,
                     criteria: Sequence[str | float] = CRITERIA, weighted: bool = True) -> SelectionReport:
    if not path:
        raise InvalidInputError("empty lasso path")
    betas = np.array([f.beta for f in path])
    lams = np.array([f.lam for f in path])
    s2 = _sigma2(design, w, betas, weighted)
    if np.any(s2 <= 0.0):
        raise InfiniteCriterionError("zero residual variance on the path: GIC is -inf")
    K = _counts(design, betas)
    names = [criterion_name(c) for c in criteria]
    table = {name: np.log(s2) + kappa_for(c, design.n) * K / design.n for name, c in zip(names, criteria)}
    records = [SelectionRecord(float(lams[i]), int(K[i]), float(s2[i]),
                               {name: float(v[i]) for name, v in table.items()})
               for i in range(len(path))]
    chosen = {name: _argmin_prefer_sparse(v, lams) for name, v in table.items()}
    return SelectionReport(records, chosen)


def select_lambda(path: Sequence[WeightedLassoFit], design: Design, w, criterion: str | float,
                  weighted: bool = True) -> int:
    """Index of the path fit minimising the GIC; ties go to the larger lambda."""
    report = selection_report(path, design, w, [criterion], weighted)
    return next(iter(report.chosen.values()))
