"""Non-negative least squares by the Lawson-Hanson active-set method.

The iterations are the classical ones; the passive-set subproblems are
solved from the normal equations ``A'A`` and ``A'b`` (computed once), which
keeps each pivot cheap when ``A`` has many more rows than columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import InvalidInputError, MaxPivotsError


@dataclass(frozen=True)
class NnlsSolution:
    alpha: np.ndarray
    residual_norm: float
    active_set: np.ndarray
    n_pivots: int


def default_tol(A: np.ndarray) -> float:
    return 10 * np.finfo(float).eps * np.linalg.norm(A, np.inf) * A.shape[1]


def _passive_solve(A, b, AtA, Atb, P):
    idx = np.flatnonzero(P)
    try:
        sol = scipy.linalg.solve(AtA[np.ix_(idx, idx)], Atb[idx], assume_a="pos",
                                 check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        sol = np.linalg.lstsq(A[:, idx], b, rcond=None)[0]
    z = np.zeros(P.shape[0])
    z[idx] = sol
    return z


def solve_nnls(A, b, tol: float | None = None, max_pivots: int | None = None) -> NnlsSolution:
    """Minimise ``||b - A a||_2`` subject to ``a >= 0``.

    ``tol`` bounds the dual variables ``A'(b - A a)`` of the inactive
    coordinates at termination; it defaults to ``10 eps ||A||_inf m``.
    Ties when picking the entering column go to the lowest index.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise InvalidInputError(f"incompatible shapes A{A.shape}, b{b.shape}")
    n, m = A.shape
    if n < 1 or m < 1:
        raise InvalidInputError("A must have at least one row and one column")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise InvalidInputError("A and b must be finite")
    if tol is None:
        tol = default_tol(A)
    if max_pivots is None:
        max_pivots = 3 * m

    AtA = A.T @ A
    Atb = A.T @ b
    x = np.zeros(m)
    P = np.zeros(m, dtype=bool)
    pivots = 0
    while True:
        w = Atb - AtA @ x
        cand = np.where(P, -np.inf, w)
        j = int(np.argmax(cand))
        if not cand[j] > tol:
            break
        pivots += 1
        if pivots > max_pivots:
            raise MaxPivotsError(f"no convergence after {max_pivots} pivots")
        P[j] = True
        while True:
            if not P.any():
                x = np.zeros(m)
                break
            z = _passive_solve(A, b, AtA, Atb, P)
            bad = P & (z <= 0)
            if not np.any(bad):
                x = z
                break
            idx = np.flatnonzero(bad)
            steps = x[idx] / (x[idx] - z[idx])
            k = int(np.argmin(steps))
            x = x + steps[k] * (z - x)
            x[idx[k]] = 0.0
            P &= x > 0
            x[~P] = 0.0
    r = b - A @ x
    return NnlsSolution(alpha=x, residual_norm=float(np.linalg.norm(r)),
                        active_set=np.flatnonzero(x > 0), n_pivots=pivots)
