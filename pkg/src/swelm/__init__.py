"""Sparse-weight extreme learning machine surrogates with closed-form Sobol' indices."""

from .elm import Dataset, HiddenLayer, TrainedSurrogate, draw_base_layer, predict, relative_error, ridge_train
from .errors import DimensionError, ExtrapolationWarning, NumericalError, SelectionWarning, SwelmError
from .montecarlo import compare_reports, estimate_sobol_mc
from .rng import SeedSpec, sample_lhs, sample_uniform
from .sobol import (SobolReport, analytic_mean, analytic_variance, first_order_indices, sobol_report,
                    subset_index, total_indices)
from .sweep import AlphaPolicy, SweepConfig, SweepResult, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AlphaPolicy", "Dataset", "DimensionError", "ExtrapolationWarning", "HiddenLayer", "NumericalError",
    "SeedSpec", "SelectionWarning", "SobolReport", "SweepConfig", "SweepResult", "SwelmError",
    "TrainedSurrogate", "analytic_mean", "analytic_variance", "compare_reports", "draw_base_layer",
    "estimate_sobol_mc", "first_order_indices", "predict", "relative_error", "ridge_train", "run_sweep",
    "sample_lhs", "sample_uniform", "sobol_report", "subset_index", "total_indices",
]
