import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from hetlasso.design import SeriesPanel, build_ar_design
from hetlasso.experiments import (
    candidate_horizon,
    run_consistency_trend,
    run_inclusion_study,
    run_mae_study,
)
from hetlasso.simulate import DgpSpec, simulate_path
from hetlasso.wlasso import PenaltySpec, lasso_path


def test_candidate_horizon():
    assert candidate_horizon(600) == 122
    assert candidate_horizon(300) == 86
    assert candidate_horizon(1200) == 173


def test_inclusion_bounds_and_extremes():
    grid = np.array([2.0 ** -4, 2.0 ** -9, 2.0 ** -40])
    rep = run_inclusion_study(DgpSpec.arch(), (600,), grid=grid, N=4, k_list=(1, 2))
    assert rep.n_reps == 4 and rep.n_failed == 0
    for key, curve in rep.curves.items():
        assert np.all((curve >= 0) & (curve <= 1))
    for k in (1, 2):
        assert rep.curves[("relevant_inclusion", 600, k)][0] < 0.05
        assert rep.curves[("irrelevant_inclusion", 600, k)][0] < 0.05
        assert rep.curves[("relevant_inclusion", 600, k)][-1] > 0.95
        assert rep.curves[("irrelevant_inclusion", 600, k)][-1] > 0.95
    assert rep.checks["ic_nesting_violations"] == 0
    assert all(r["n_reps"] == 4 for r in rep.rows)


def test_plain_lasso_baseline():
    grid = np.geomspace(2.0 ** -5, 2.0 ** -12, 6)
    dgp = DgpSpec.arch()
    rep = run_inclusion_study(dgp, (300,), grid=grid, N=2, k_list=(1,))
    rel = []
    for r in range(2):
        y = simulate_path(replace(dgp, n=300 + 86), r)
        d = build_ar_design(SeriesPanel(y), 0, range(1, 87), include_intercept=False)
        path = lasso_path(d, np.ones(300), PenaltySpec.build(d, 0.0), grid * 2 * 300)
        support = [c.lag in (1, 4, 9, 16, 25, 36, 49, 64, 81) for c in d.columns]
        rel.append([np.mean(f.beta[support] != 0) for f in path])
    np.testing.assert_allclose(rep.curves[("relevant_inclusion", 300, 1)], np.mean(rel, axis=0))


def test_zero_forecast_mae_is_mean_abs_target():
    dgp = DgpSpec.arch()
    rep = run_mae_study(dgp, 300, grid=np.array([2.0 ** 4]), N=5, k_list=(1, 2), oracle=True)
    targets = [simulate_path(replace(dgp, n=300 + 86 + 1), r)[-1] for r in range(5)]
    for metric in ("mae", "mae_oracle"):
        for k in (1, 2):
            assert rep.curves[(metric, 300, k)][0] == pytest.approx(np.mean(np.abs(targets)), rel=1e-12)


def test_thread_count_does_not_change_results():
    grid = np.geomspace(2.0 ** -6, 2.0 ** -10, 4)
    a = run_mae_study(DgpSpec.arch(), 300, grid=grid, N=4, k_list=(1, 2), oracle=False, threads=1)
    b = run_mae_study(DgpSpec.arch(), 300, grid=grid, N=4, k_list=(1, 2), oracle=False, threads=2)
    for key in a.curves:
        assert a.curves[key].tobytes() == b.curves[key].tobytes()


def test_trend_null_model_and_small_n():
    null = run_consistency_trend(DgpSpec.arch(mass=0.0), (1200,), N=20)
    assert null.points[("sign_recovery", 1200)] >= 0.9
    rep = run_consistency_trend(DgpSpec.arch(), (50, 1200), N=20)
    assert rep.points[("sign_recovery", 50)] < rep.points[("sign_recovery", 1200)]
    with pytest.raises(ValueError):
        run_consistency_trend(DgpSpec.arch(), (600, 300), N=1)


def test_writers(tmp_path):
    rep = run_mae_study(DgpSpec.arch(), 300, grid=np.array([2.0 ** -6, 2.0 ** -8]), N=2, k_list=(1,), oracle=False)
    path = rep.write_csv(tmp_path / "mae.csv")
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["lambda", "k", "n", "metric", "value", "n_reps"]
    assert len(rows) == 2 and float(rows[0]["lambda"]) == 2.0 ** -6
    man = json.loads(rep.write_manifest(tmp_path / "m.json", {"seed": 0}).read_text())
    assert man["seed"] == 0 and man["config"]["dgp"]["seed"] == 0 and "version" in man


def test_failed_replications_are_counted():
    explosive = DgpSpec(support={1: 1.5}, alpha=(0.0, 0.0))
    rep = run_consistency_trend(explosive, (100,), N=3)
    assert rep.n_failed == 3 and np.isnan(rep.points[("sign_recovery", 100)])
