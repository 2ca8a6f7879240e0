"""Brute-force reference solutions used by the tests (independent of the package solvers)."""

import itertools

import numpy as np


def lasso_enum(X, y, w, lam, v):
    """Exact minimiser of sum w^2 (y - Xb)^2 + lam * sum v|b| by enumerating sign patterns.

    For every support S and sign vector s on S the stationary point
    b_S = G_SS^-1 (c_S - lam/2 v_S s) is a candidate if sign(b_S) == s.
    Columns with v == 0 are always in the support (sign irrelevant).
    Returns (beta, objective).
    """
    X = np.asarray(X, float)
    w = np.asarray(w, float)
    v = np.asarray(v, float)
    Xw = X * w[:, None]
    yw = y * w
    G = Xw.T @ Xw
    c = Xw.T @ yw
    p = X.shape[1]
    free = [j for j in range(p) if v[j] == 0]
    pen = [j for j in range(p) if v[j] > 0]

    def obj(b):
        r = yw - Xw @ b
        return float(r @ r) + lam * float(np.sum(v * np.abs(b)))

    best_b, best = np.zeros(p), np.inf
    for k in range(len(pen) + 1):
        for sub in itertools.combinations(pen, k):
            S = free + list(sub)
            if not S:
                b = np.zeros(p)
                f = obj(b)
                if f < best:
                    best, best_b = f, b
                continue
            GS = G[np.ix_(S, S)]
            if np.linalg.matrix_rank(GS) < len(S):
                continue
            signs = np.array(list(itertools.product((-1.0, 1.0), repeat=k))).T  # k x 2^k
            rhs = np.repeat(c[S][:, None], signs.shape[1], axis=1)
            if k:
                rhs[len(free):] -= 0.5 * lam * v[list(sub)][:, None] * signs
            sols = np.linalg.solve(GS, rhs)
            for col in range(sols.shape[1]):
                bs = sols[:, col]
                if k and lam > 0 and not np.all(np.sign(bs[len(free):]) == signs[:, col]):
                    continue
                b = np.zeros(p)
                b[S] = bs
                f = obj(b)
                if f < best:
                    best, best_b = f, b
    return best_b, best


def nnls_enum(A, b):
    """Exact NNLS by enumerating all passive subsets. Returns (alpha, residual_norm)."""
    A = np.asarray(A, float)
    m = A.shape[1]
    best_x, best = np.zeros(m), float(np.linalg.norm(b))
    for k in range(1, m + 1):
        for sub in itertools.combinations(range(m), k):
            idx = list(sub)
            z = np.linalg.lstsq(A[:, idx], b, rcond=None)[0]
            if np.any(z < 0):
                continue
            x = np.zeros(m)
            x[idx] = z
            r = float(np.linalg.norm(b - A @ x))
            if r < best:
                best, best_x = r, x
    return best_x, best


def as_design(X, y, intercept=False):
    """Wrap a raw matrix as a Design; column 0 is the intercept when ``intercept``."""
    from hetlasso.design import INTERCEPT, Column, Design

    X = np.asarray(X, float)
    cols = [INTERCEPT if (intercept and j == 0) else Column(0, j + 1) for j in range(X.shape[1])]
    return Design(y=np.asarray(y, float), X=X, columns=tuple(cols), col_scale=np.ones(X.shape[1]),
                  max_lag=X.shape[1], n_effective=X.shape[0])


def random_design(rng, n, p, intercept=False):
    X = rng.standard_normal((n, p))
    X /= np.sqrt(np.mean(X * X, axis=0))
    if intercept:
        X[:, 0] = 1.0
    beta = np.where(rng.random(p) < 0.5, rng.standard_normal(p), 0.0)
    y = X @ beta + 0.5 * rng.standard_normal(n)
    return as_design(X, y, intercept)
