"""Lagged regression designs built from a multivariate panel.

Every non-intercept column is divided by its empirical root mean square, so
that ``mean(X[:, j] ** 2) == 1``. Columns are not centred; the intercept
column (when present) absorbs the mean and is never rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .exceptions import (
    DegenerateColumnError,
    EmptyDesignError,
    InsufficientDataError,
    InvalidInputError,
)


@dataclass(frozen=True)
class SeriesPanel:
    """``d`` observed series over ``T`` time points, stored as a (d, T) array."""

    values: np.ndarray
    series_names: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim == 1:
            values = values[None, :]
        if values.ndim != 2:
            raise InvalidInputError("panel values must be a (d, T) matrix")
        d, T = values.shape
        if d < 1 or T < 2:
            raise InvalidInputError(f"panel needs d >= 1 and T >= 2, got d={d}, T={T}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InvalidInputError(f"non-finite value at series {bad[0]}, time {bad[1]}")
        values.setflags(write=False)
        names = tuple(self.series_names) or tuple(f"y{i + 1}" for i in range(d))
        if len(names) != d:
            raise InvalidInputError(f"{len(names)} names for {d} series")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "series_names", names)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    def head(self, T: int) -> "SeriesPanel":
        return SeriesPanel(self.values[:, :T], self.series_names)


def _canonical_lags(lags: Iterable[int]) -> tuple[int, ...]:
    out = []
    for k in lags:
        if int(k) != k:
            raise InvalidInputError(f"lag {k!r} is not an integer")
        out.append(int(k))
    if any(k < 1 for k in out):
        raise InvalidInputError("lags must be >= 1")
    if len(set(out)) != len(out):
        raise InvalidInputError("duplicate lag in lag set")
    return tuple(sorted(out))


class LagIndexSets:
    """Candidate lags per (target series, source series) pair.

    Input order inside each list does not matter; lists are stored sorted.
    Pairs that are never set are empty.
    """

    def __init__(self, sets: Mapping[tuple[int, int], Iterable[int]] | None = None):
        self._sets: dict[tuple[int, int], tuple[int, ...]] = {}
        for (i, j), lags in (sets or {}).items():
            lags = _canonical_lags(lags)
            if lags:
                self._sets[(int(i), int(j))] = lags

    @classmethod
    def uniform(cls, d: int, lags: Iterable[int]) -> "LagIndexSets":
        lags = tuple(lags)
        return cls({(i, j): lags for i in range(d) for j in range(d)})

    @classmethod
    def univariate(cls, lags: Iterable[int]) -> "LagIndexSets":
        return cls({(0, 0): lags})

    @classmethod
    def coerce(cls, lags, d: int) -> "LagIndexSets":
        if isinstance(lags, LagIndexSets):
            return lags
        if isinstance(lags, Mapping):
            return cls(lags)
        return cls.uniform(d, lags)

    def get(self, target: int, source: int) -> tuple[int, ...]:
        return self._sets.get((target, source), ())

    def for_target(self, target: int, d: int) -> list[tuple[int, tuple[int, ...]]]:
        return [(j, self.get(target, j)) for j in range(d)]

    def max_lag(self, target: int | None = None) -> int:
        vals = [max(v) for (i, _), v in self._sets.items() if target is None or i == target]
        return max(vals, default=0)

    def __eq__(self, other):
        return isinstance(other, LagIndexSets) and self._sets == other._sets

    def __hash__(self):
        return hash(tuple(sorted(self._sets.items())))

    def __repr__(self):
        return f"LagIndexSets({self._sets!r})"

    def to_dict(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return dict(self._sets)


class Column(NamedTuple):
    source: int | None
    lag: int

    @property
    def is_intercept(self) -> bool:
        return self.source is None


INTERCEPT = Column(None, 0)


@dataclass(frozen=True)
class Design:
    y: np.ndarray
    X: np.ndarray
    columns: tuple[Column, ...]
    col_scale: np.ndarray
    max_lag: int
    n_effective: int
    target: int = 0
    start: int = 0
    series_names: tuple[str, ...] = field(default=(), compare=False)

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def intercept_index(self) -> int | None:
        for idx, col in enumerate(self.columns):
            if col.is_intercept:
                return idx
        return None

    @property
    def penalized(self) -> np.ndarray:
        mask = np.ones(self.p, dtype=bool)
        if self.intercept_index is not None:
            mask[self.intercept_index] = False
        return mask

    def column_index(self, source: int, lag: int) -> int:
        return self.columns.index(Column(source, lag))

    def lag_row(self, values: np.ndarray, t: int) -> np.ndarray:
        """Standardized regressor row for 0-based time ``t`` of ``values`` (d, T').

        ``t`` may equal ``values.shape[1]``, which gives the one-step-ahead row.
        In-sample scales are reused.
        """
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[None, :]
        row = np.empty(self.p)
        for idx, (src, lag) in enumerate(self.columns):
            if src is None:
                row[idx] = 1.0
            else:
                if t - lag < 0 or t - lag >= values.shape[1]:
                    raise InsufficientDataError(f"no value for series {src} at time {t - lag}")
                row[idx] = values[src, t - lag] / self.col_scale[idx]
        return row


def build_ar_design(panel: SeriesPanel, target: int, lags, include_intercept: bool = True,
                    start: int | None = None) -> Design:
    """Regress series ``target`` on lags of every series in ``panel``.

    ``lags`` is a :class:`LagIndexSets`, a mapping ``{(i, j): lags}``, or a
    plain sequence applied to every source series. Rows cover 0-based times
    ``start .. T-1`` where ``start`` defaults to the largest lag used; a
    larger ``start`` lets several targets share the same rows.
    """
    if not 0 <= target < panel.d:
        raise InvalidInputError(f"target {target} outside 0..{panel.d - 1}")
    lag_sets = LagIndexSets.coerce(lags, panel.d)
    per_source = lag_sets.for_target(target, panel.d)
    max_lag = max((max(ls) for _, ls in per_source if ls), default=0)
    if start is None:
        start = max_lag
    elif start < max_lag:
        raise InvalidInputError(f"start {start} below the largest lag {max_lag}")
    T = panel.T
    if max_lag >= T or start >= T:
        raise InsufficientDataError(f"largest lag {max(max_lag, start)} needs more than T={T} points")

    columns: list[Column] = []
    if include_intercept:
        columns.append(INTERCEPT)
    for j, ls in per_source:
        columns.extend(Column(j, k) for k in ls)
    if not columns:
        raise EmptyDesignError("no lags and no intercept: empty design")

    n = T - start
    X = np.empty((n, len(columns)))
    scale = np.ones(len(columns))
    values = panel.values
    for idx, col in enumerate(columns):
        if col.is_intercept:
            X[:, idx] = 1.0
            continue
        raw = values[col.source, start - col.lag:T - col.lag]
        if np.ptp(raw) == 0.0:
            raise DegenerateColumnError(col, f"series {col.source} lag {col.lag} is constant over the sample")
        rms = np.sqrt(np.mean(raw * raw))
        scale[idx] = rms
        X[:, idx] = raw / rms
    y = values[target, start:].copy()
    for arr in (X, y, scale):
        arr.setflags(write=False)
    return Design(y=y, X=X, columns=tuple(columns), col_scale=scale, max_lag=max_lag,
                  n_effective=n, target=target, start=start, series_names=panel.series_names)


def destandardize_coefficients(beta_std, design: Design) -> np.ndarray:
    beta_std = np.asarray(beta_std, dtype=float)
    if beta_std.shape != (design.p,):
        raise InvalidInputError(f"expected {design.p} coefficients, got shape {beta_std.shape}")
    return beta_std / design.col_scale


def lag_columns(design: Design, source: int | None = None) -> list[int]:
    """Indices of non-intercept columns, optionally for one source series."""
    return [i for i, c in enumerate(design.columns)
            if not c.is_intercept and (source is None or c.source == source)]


def restrict_design(design: Design, keep: Sequence[int]) -> Design:
    """Design with only the listed columns (used by oracle estimators)."""
    keep = list(keep)
    if not keep:
        raise EmptyDesignError("restriction keeps no columns")
    X = design.X[:, keep].copy()
    scale = design.col_scale[keep].copy()
    for arr in (X, scale):
        arr.setflags(write=False)
    return Design(y=design.y, X=X, columns=tuple(design.columns[i] for i in keep),
                  col_scale=scale, max_lag=design.max_lag, n_effective=design.n_effective,
                  target=design.target, start=design.start, series_names=design.series_names)
