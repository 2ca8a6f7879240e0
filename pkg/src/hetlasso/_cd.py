"""Compiled coordinate-descent kernel for the weighted lasso (Gram form)."""

import numpy as np
from numba import njit


@njit(cache=True)
def _sweep(G, g, beta, thresh, frozen, idx):
    max_change = 0.0
    p = g.shape[0]
    for jj in range(idx.shape[0]):
        j = idx[jj]
        if frozen[j]:
            continue
        s = G[j, j]
        if s <= 0.0:
            continue
        bj = beta[j]
        rho = g[j] + s * bj
        t = thresh[j]
        if rho > t:
            new = (rho - t) / s
        elif rho < -t:
            new = (rho + t) / s
        else:
            new = 0.0
        delta = new - bj
        if delta != 0.0:
            beta[j] = new
            for k in range(p):
                g[k] -= G[j, k] * delta
            a = abs(delta)
            if a > max_change:
                max_change = a
    return max_change


@njit(cache=True)
def _objective(yWy, c, g, beta, thresh, frozen):
    # smooth part: y'W^2y - 2c'b + b'Gb, and Gb = c - g
    smooth = yWy
    pen = 0.0
    for j in range(beta.shape[0]):
        smooth -= c[j] * beta[j] + beta[j] * g[j]
        if not frozen[j]:
            pen += 2.0 * thresh[j] * abs(beta[j])
    return smooth + pen


@njit(cache=True)
def cd_solve(G, c, yWy, thresh, frozen, beta, tol, max_sweeps, record):
    """Minimise b'Gb - 2c'b + sum_j 2*thresh_j*|b_j| in place.

    ``thresh`` holds lambda*v_j/2. Returns (sweeps, converged, trace) where
    trace has the objective after every sweep when ``record`` is set.
    """
    p = c.shape[0]
    all_idx = np.arange(p)
    g = c - G @ beta
    trace = np.empty(max_sweeps + 1 if record else 1)
    n_trace = 0
    if record:
        trace[0] = _objective(yWy, c, g, beta, thresh, frozen)
        n_trace = 1
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        g = c - G @ beta
        change = _sweep(G, g, beta, thresh, frozen, all_idx)
        sweeps += 1
        if record:
            trace[n_trace] = _objective(yWy, c, g, beta, thresh, frozen)
            n_trace += 1
        if change < tol:
            converged = True
            break
        active = np.nonzero(beta)[0]
        while sweeps < max_sweeps:
            change = _sweep(G, g, beta, thresh, frozen, active)
            sweeps += 1
            if record:
                trace[n_trace] = _objective(yWy, c, g, beta, thresh, frozen)
                n_trace += 1
            if change < tol:
                break
    return sweeps, converged, trace[:n_trace]


@njit(cache=True)
def cd_objective(yWy, c, G, beta, thresh, frozen):
    g = c - G @ beta
    return _objective(yWy, c, g, beta, thresh, frozen)
