"""Iteratively reweighted adaptive lasso for sparse high-dimensional AR models
with ARCH-type conditional heteroscedasticity."""

__version__ = "0.1.0"

from .design import (
    Column,
    Design,
    LagIndexSets,
    SeriesPanel,
    build_ar_design,
    destandardize_coefficients,
)
from .exceptions import HetLassoError
from .irwal import FixedLambda, GridSelection, IrwalConfig, IrwalResult, irwal_fit, multivariate_fit
from .nnls import solve_nnls
from .selection import evaluate_gic, select_lambda, selection_report
from .simulate import DgpSpec, simulate_path
from .volatility import VolatilitySpec, fit_volatility, forecast_sigma
from .wlasso import PenaltySpec, WeightedLassoFit, check_kkt, lasso_path, solve_weighted_lasso

__all__ = [
    "Column", "Design", "LagIndexSets", "SeriesPanel", "build_ar_design", "destandardize_coefficients",
    "HetLassoError", "FixedLambda", "GridSelection", "IrwalConfig", "IrwalResult", "irwal_fit",
    "multivariate_fit", "solve_nnls", "evaluate_gic", "select_lambda", "selection_report",
    "DgpSpec", "simulate_path", "VolatilitySpec", "fit_volatility", "forecast_sigma",
    "PenaltySpec", "WeightedLassoFit", "check_kkt", "lasso_path", "solve_weighted_lasso",
    "__version__",
]
