import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetlasso.csvio import read_panel_csv, write_panel_csv
from hetlasso.design import (
    LagIndexSets,
    SeriesPanel,
    build_ar_design,
    destandardize_coefficients,
    lag_columns,
    restrict_design,
)
from hetlasso.exceptions import (
    DegenerateColumnError,
    EmptyDesignError,
    InsufficientDataError,
    InvalidInputError,
    ParseError,
)


def test_single_lag_example():
    d = build_ar_design(SeriesPanel([1, 2, 3, 4, 5]), 0, [1], include_intercept=False)
    assert np.array_equal(d.y, [2, 3, 4, 5])
    np.testing.assert_allclose(d.X[:, 0], np.array([1, 2, 3, 4]) / np.sqrt(30 / 4), rtol=0, atol=1e-15)
    assert d.n == d.n_effective == 4 and d.max_lag == 1


def test_two_series_700_lags_column_count():
    rng = np.random.default_rng(0)
    panel = SeriesPanel(rng.standard_normal((2, 800)))
    d = build_ar_design(panel, 1, LagIndexSets.uniform(2, range(1, 701)))
    assert d.p == 1401 and d.n == 100
    assert d.intercept_index == 0
    assert d.penalized.sum() == 1400


def test_unit_rms_and_row_alignment():
    rng = np.random.default_rng(1)
    vals = rng.standard_normal((3, 60)) + 2.0
    panel = SeriesPanel(vals)
    lags = {(2, 0): [3, 1], (2, 2): [2, 5], (2, 1): [4]}
    d = build_ar_design(panel, 2, lags)
    assert d.columns[0].is_intercept and np.all(d.X[:, 0] == 1.0)
    for j in lag_columns(d):
        assert abs(np.mean(d.X[:, j] ** 2) - 1.0) < 1e-10
        src, lag = d.columns[j]
        for row in range(d.n):
            t = d.start + row
            assert d.X[row, j] == vals[src, t - lag] / d.col_scale[j]
    assert np.array_equal(d.y, vals[2, 5:])


def test_lag_order_is_irrelevant():
    rng = np.random.default_rng(2)
    panel = SeriesPanel(rng.standard_normal(40))
    a = build_ar_design(panel, 0, [3, 1, 2])
    b = build_ar_design(panel, 0, [1, 2, 3])
    assert a.columns == b.columns and np.array_equal(a.X, b.X)


def test_errors():
    panel = SeriesPanel([1.0, 2.0, 4.0, 3.0])
    with pytest.raises(InsufficientDataError):
        build_ar_design(panel, 0, [4])
    with pytest.raises(EmptyDesignError):
        build_ar_design(panel, 0, [], include_intercept=False)
    with pytest.raises(DegenerateColumnError) as info:
        build_ar_design(SeriesPanel([1.0, 1.0, 1.0, 2.0]), 0, [1])
    assert info.value.column.lag == 1
    with pytest.raises(InvalidInputError):
        LagIndexSets.univariate([1, 1])
    with pytest.raises(InvalidInputError):
        LagIndexSets.univariate([0])
    with pytest.raises(InvalidInputError):
        SeriesPanel([1.0, np.nan, 2.0])
    with pytest.raises(InvalidInputError):
        build_ar_design(panel, 1, [1])


def test_destandardize():
    rng = np.random.default_rng(3)
    d = build_ar_design(SeriesPanel(rng.standard_normal(30)), 0, [1])
    np.testing.assert_array_equal(destandardize_coefficients(np.array([1.5, 2.0]), d),
                                  [1.5, 2.0 / d.col_scale[1]])
    with pytest.raises(InvalidInputError):
        destandardize_coefficients(np.zeros(3), d)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.lists(st.integers(1, 8), min_size=1, max_size=4, unique=True))
def test_destandardize_roundtrip_fitted_values(seed, d_series, lags):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((d_series, 40)) * rng.uniform(0.1, 10, (d_series, 1)) + 3
    panel = SeriesPanel(vals)
    des = build_ar_design(panel, 0, lags)
    beta = rng.standard_normal(des.p)
    orig = destandardize_coefficients(beta, des)
    fitted_std = des.X @ beta
    raw = np.column_stack([np.ones(des.n) if c.is_intercept else vals[c.source, des.start - c.lag:40 - c.lag]
                           for c in des.columns])
    assert np.max(np.abs(raw @ orig - fitted_std)) < 1e-10


def test_lag_row_matches_design_rows_and_forecast_row():
    rng = np.random.default_rng(4)
    vals = rng.standard_normal((2, 50))
    d = build_ar_design(SeriesPanel(vals), 0, LagIndexSets.uniform(2, [1, 3]))
    for row in (0, 7, d.n - 1):
        np.testing.assert_array_equal(d.lag_row(vals, d.start + row), d.X[row])
    nxt = d.lag_row(vals, 50)
    assert nxt[1] == vals[0, 49] / d.col_scale[1]
    with pytest.raises(InsufficientDataError):
        d.lag_row(vals, 51)


def test_common_start_and_restrict():
    rng = np.random.default_rng(5)
    panel = SeriesPanel(rng.standard_normal(30))
    d = build_ar_design(panel, 0, [1, 2], start=5)
    assert d.n == 25 and d.start == 5
    with pytest.raises(InvalidInputError):
        build_ar_design(panel, 0, [1, 6], start=5)
    r = restrict_design(d, [2])
    assert r.p == 1 and r.columns == (d.columns[2],) and np.array_equal(r.X[:, 0], d.X[:, 2])


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(6)
    panel = SeriesPanel(rng.standard_normal((2, 20)) * 1e-3, ("a", "b"))
    path = write_panel_csv(panel, tmp_path / "p.csv")
    back = read_panel_csv(path)
    assert back.series_names == ("a", "b")
    np.testing.assert_array_equal(back.values, panel.values)


@pytest.mark.parametrize("text, row, col", [
    ("", 1, None),
    ("a,b\n1,2\n", None, None),
    ("a,b\n1,2\n3\n", 3, None),
    ("a,b\n1,2\n3,x\n", 3, 2),
    ("a,b\n1,2\n3,nan\n", 3, 2),
])
def test_csv_parse_errors(tmp_path, text, row, col):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as info:
        read_panel_csv(path)
    assert info.value.row == row and info.value.column == col
    assert str(path) in str(info.value)
