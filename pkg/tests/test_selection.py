import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetlasso.design import SeriesPanel, build_ar_design
from hetlasso.exceptions import InfiniteCriterionError, InvalidInputError
from hetlasso.selection import (
    CRITERIA,
    evaluate_gic,
    kappa_for,
    select_lambda,
    selection_report,
)
from hetlasso.simulate import DgpSpec, simulate_path
from hetlasso.wlasso import PenaltySpec, WeightedLassoFit, lasso_path, default_lambda_grid
from oracles import as_design, random_design


def _fit(beta, lam=1.0):
    beta = np.asarray(beta, float)
    return WeightedLassoFit(beta, np.flatnonzero(beta), lam, 0.0, 0, True, 0.0)


def test_kappas():
    n = 600
    assert kappa_for("aic", n) == 2.0
    assert kappa_for("HQC", n) == 2 * math.log(math.log(n))
    assert kappa_for("bic", n) == math.log(n)
    assert kappa_for(3.5, n) == 3.5
    with pytest.raises(InvalidInputError):
        kappa_for("cv", n)


def test_empty_model_gic():
    rng = np.random.default_rng(0)
    d = random_design(rng, 30, 3)
    w = rng.uniform(0.5, 2, 30)
    val = evaluate_gic(_fit(np.zeros(3)), d, w, "bic")
    assert abs(val - math.log(np.mean(w ** 2 * d.y ** 2))) < 1e-12


def test_useless_coefficient_costs_kappa_over_n():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((40, 3))
    X[:, 2] = 0.0  # contributes nothing to the residuals
    d = as_design(X, rng.standard_normal(40))
    w = np.ones(40)
    a = evaluate_gic(_fit([0.3, 0.0, 0.0]), d, w, 2.0)
    b = evaluate_gic(_fit([0.3, 0.0, 5.0]), d, w, 2.0)
    assert abs((b - a) - 2.0 / 40) < 1e-12


def test_intercept_not_counted_and_unweighted_mode():
    rng = np.random.default_rng(2)
    d = random_design(rng, 30, 3, intercept=True)
    w = rng.uniform(0.5, 2, 30)
    rep = selection_report([_fit([1.0, 0.5, 0.0])], d, w, weighted=False)
    r = d.y - d.X @ np.array([1.0, 0.5, 0.0])
    assert rep.records[0].K == 1
    assert abs(rep.records[0].sigma2_hat - np.mean(r ** 2)) < 1e-14


def test_zero_variance_guard():
    X = np.eye(3)
    d = as_design(X, np.array([1.0, 2.0, 3.0]))
    with pytest.raises(InfiniteCriterionError):
        evaluate_gic(_fit([1.0, 2.0, 3.0]), d, np.ones(3), "aic")


def test_single_path_and_dominance_and_ties():
    rng = np.random.default_rng(3)
    d = random_design(rng, 50, 4)
    w = np.ones(50)
    assert select_lambda([_fit(np.zeros(4))], d, w, "bic") == 0
    ols = np.linalg.lstsq(d.X, d.y, rcond=None)[0]
    sparse_good = ols.copy()
    sparse_good[np.argsort(np.abs(ols))[:1]] = 0.0
    worse = np.zeros(4)
    worse[0] = 1e-6 + sparse_good[0] * 0
    worse[1:] = sparse_good[1:] + 1.0  # more coefficients and a bigger residual
    path = [_fit(worse, 3.0), _fit(sparse_good, 2.0)]
    for crit in CRITERIA:
        assert select_lambda(path, d, w, crit) == 1
    # identical fits: the tie goes to the larger lambda
    same = [_fit(sparse_good, 1.0), _fit(sparse_good, 5.0), _fit(sparse_good, 2.0)]
    assert select_lambda(same, d, w, "aic") == 1
    with pytest.raises(InvalidInputError):
        select_lambda([], d, w, "bic")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_gic_monotone_in_kappa_and_permutation_invariant(seed, k1, dk):
    rng = np.random.default_rng(seed)
    d = random_design(rng, 30, 5)
    w = rng.uniform(0.5, 2, 30)
    beta = rng.standard_normal(5)
    beta[0] = 0.0
    assert evaluate_gic(_fit(beta), d, w, k1 + dk) > evaluate_gic(_fit(beta), d, w, k1)
    perm = rng.permutation(5)
    dp = as_design(d.X[:, perm], d.y)
    assert abs(evaluate_gic(_fit(beta[perm]), dp, w, k1) - evaluate_gic(_fit(beta), d, w, k1)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nesting_on_random_paths(seed):
    rng = np.random.default_rng(seed)
    d = random_design(rng, 60, 10, intercept=True)
    w = rng.uniform(0.5, 2, 60)
    path = lasso_path(d, w, PenaltySpec.build(d, 0.0), np.geomspace(200, 0.01, 40))
    rep = selection_report(path, d, w)
    K = {c: rep.records[rep.chosen[c]].K for c in CRITERIA}
    assert K["bic"] <= K["hqc"] <= K["aic"]
    for rec, fit in zip(rep.records, path):
        assert rec.K == np.count_nonzero(fit.beta[1:]) and rec.lam == fit.lam


def test_bic_sparser_than_aic_on_dgp():
    n, horizon = 600, 122
    ok = 0
    for rep in range(200):
        y = simulate_path(DgpSpec.arch(n=n + horizon, seed=21), rep)
        d = build_ar_design(SeriesPanel(y), 0, range(1, horizon + 1), include_intercept=False)
        w = np.ones(d.n)
        path = lasso_path(d, w, PenaltySpec.build(d, 0.0), 2 * d.n * default_lambda_grid(25))
        r = selection_report(path, d, w)
        ok += r.records[r.chosen["bic"]].K <= r.records[r.chosen["aic"]].K
    assert ok >= 190
