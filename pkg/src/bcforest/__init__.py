"""Bagged regression trees and random forests with a cheap
residual-bootstrap bias correction.

The corrected predictor is 2 * base - shadow, where the shadow
ensemble is refit on synthetic responses built from the base fit plus
resampled out-of-bag residuals; its own bias relative to the base
estimates the base's bias relative to the truth.
"""

from .correction import (
    CorrectedModel,
    build_shadow,
    build_shadow_classification,
    classification_shadow_responses,
    correct_ensemble,
    correct_ensemble_classification,
    corrected_predict,
    corrected_predict_matrix,
    corrected_prob,
    corrected_prob_matrix,
    estimate_prob,
    estimate_prob_matrix,
    shadow_responses,
)
from .data import Dataset, FoldAssignment, load_csv, make_folds
from .ensemble import (
    Ensemble,
    OobResult,
    ResampleScheme,
    draw_sample,
    fit_ensemble,
    oob_mse,
    oob_residuals,
    predict_matrix,
    predict_point,
)
from .errors import (
    AlgorithmError,
    BcforestError,
    ConfigError,
    IngestionError,
    UsageError,
)
from .experiments import (
    CvResult,
    FigureTable,
    MetricReport,
    ScalingTable,
    default_grid,
    emit_figure_data,
    empirical_quantile,
    run_bias_experiment,
    run_classification_experiment,
    run_cv,
    summarize_predictions,
    variance_scaling_check,
)
from .model_io import load_model, save_model
from .rng import (
    ROLE_BASE,
    ROLE_DATA,
    ROLE_FOLD,
    ROLE_LABEL,
    ROLE_REBUILD,
    ROLE_REP,
    ROLE_SHADOW,
    ROLE_TEST,
    RngSpec,
    child_seed,
    child_spec,
    derive_stream,
)
from .simdata import (
    SimModel,
    draw_inputs,
    gen_1d,
    gen_10d,
    generate,
    true_mean,
    true_prob,
)
from .tree import FIT_COUNTER, SplitParams, Tree, fit_tree, predict_tree, rf_mtry

__version__ = "0.1.0"

__all__ = [
    "AlgorithmError",
    "BcforestError",
    "ConfigError",
    "CorrectedModel",
    "CvResult",
    "Dataset",
    "Ensemble",
    "FIT_COUNTER",
    "FigureTable",
    "FoldAssignment",
    "IngestionError",
    "MetricReport",
    "OobResult",
    "ResampleScheme",
    "RngSpec",
    "ROLE_BASE",
    "ROLE_DATA",
    "ROLE_FOLD",
    "ROLE_LABEL",
    "ROLE_REBUILD",
    "ROLE_REP",
    "ROLE_SHADOW",
    "ROLE_TEST",
    "ScalingTable",
    "SimModel",
    "SplitParams",
    "Tree",
    "UsageError",
    "build_shadow",
    "build_shadow_classification",
    "child_seed",
    "child_spec",
    "classification_shadow_responses",
    "correct_ensemble",
    "correct_ensemble_classification",
    "corrected_predict",
    "corrected_predict_matrix",
    "corrected_prob",
    "corrected_prob_matrix",
    "default_grid",
    "derive_stream",
    "draw_inputs",
    "draw_sample",
    "emit_figure_data",
    "empirical_quantile",
    "estimate_prob",
    "estimate_prob_matrix",
    "fit_ensemble",
    "fit_tree",
    "gen_10d",
    "gen_1d",
    "generate",
    "load_csv",
    "load_model",
    "make_folds",
    "oob_mse",
    "oob_residuals",
    "predict_matrix",
    "predict_point",
    "predict_tree",
    "rf_mtry",
    "run_bias_experiment",
    "run_classification_experiment",
    "run_cv",
    "save_model",
    "shadow_responses",
    "summarize_predictions",
    "true_mean",
    "true_prob",
    "variance_scaling_check",
]
