"""Monte-Carlo experiment drivers, evaluation metrics, and table output.

Each driver draws one fixed test set, runs independent replications
(fresh training data, fresh ensembles), and aggregates per-point
statistics:

* squared bias: (mean prediction over replications - truth)^2
* variance: sample variance of predictions over replications
* MSE: mean squared deviation from the noiseless truth

Reported ratios compare the corrected predictor against the base
ensemble: bias_imp = 1 - mean(sq_bias_corr)/mean(sq_bias_base), same
for pred_imp on MSE; var_ratio = mean(var_corr)/mean(var_base).
A zero denominator makes the metric undefined (None), never NaN.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .correction import (
    correct_ensemble,
    correct_ensemble_classification,
    corrected_predict_matrix,
    corrected_prob_matrix,
    estimate_prob_matrix,
    build_shadow,
)
from .data import Dataset, make_folds
from .ensemble import (
    Ensemble,
    ResampleScheme,
    _ordered_map,
    fit_ensemble,
    oob_residuals,
    predict_matrix,
)
from .errors import ConfigError, UsageError
from .rng import (
    ROLE_DATA,
    ROLE_FOLD,
    ROLE_LABEL,
    ROLE_REBUILD,
    ROLE_REP,
    ROLE_TEST,
    RngSpec,
    child_spec,
    derive_stream,
)
from .simdata import SimModel, draw_inputs, generate, true_mean, true_prob
from .tree import SplitParams


@dataclass
class MetricReport:
    """Summary metrics plus per-point diagnostics for one experiment."""

    bias_imp: float | None
    pred_imp: float | None
    var_ratio: float | None
    miss_imp: float | None
    sq_bias_base: np.ndarray
    sq_bias_corr: np.ndarray
    var_base: np.ndarray
    var_corr: np.ndarray
    mse_base: np.ndarray
    mse_corr: np.ndarray
    truth: np.ndarray
    test_points: np.ndarray
    preds_base: np.ndarray
    preds_corr: np.ndarray
    miss_rate_base: float | None = None
    miss_rate_corr: float | None = None
    config: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "bias_imp": self.bias_imp,
            "pred_imp": self.pred_imp,
            "var_ratio": self.var_ratio,
            "miss_imp": self.miss_imp,
            "miss_rate_base": self.miss_rate_base,
            "miss_rate_corr": self.miss_rate_corr,
            "config": dict(self.config),
        }


def _ratio_complement(num: np.ndarray, den: np.ndarray) -> float | None:
    """1 - mean(num)/mean(den), or None when the denominator vanishes."""
    d = float(np.mean(den))
    if d == 0.0:
        return None
    return 1.0 - float(np.mean(num)) / d


def summarize_predictions(
    preds_base: np.ndarray,
    preds_corr: np.ndarray,
    truth: np.ndarray,
    *,
    mse_target: np.ndarray | None = None,
    test_points: np.ndarray | None = None,
    labels: np.ndarray | None = None,
) -> MetricReport:
    """Aggregate (reps x n_test) prediction matrices into a MetricReport.

    ``labels`` (reps x n_test, binary) switches on misclassification
    metrics at the 0.5 threshold.
    """
    preds_base = np.asarray(preds_base, dtype=np.float64)
    preds_corr = np.asarray(preds_corr, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if preds_base.shape != preds_corr.shape or preds_base.ndim != 2:
        raise UsageError("prediction matrices must share shape (reps, n_test)")
    if preds_base.shape[0] < 2:
        raise ConfigError("need at least 2 replications for variance estimates")
    if truth.shape != (preds_base.shape[1],):
        raise UsageError("truth must have one value per test point")
    target = truth if mse_target is None else np.asarray(mse_target, dtype=np.float64)

    sq_bias_base = (preds_base.mean(axis=0) - truth) ** 2
    sq_bias_corr = (preds_corr.mean(axis=0) - truth) ** 2
    var_base = preds_base.var(axis=0, ddof=1)
    var_corr = preds_corr.var(axis=0, ddof=1)
    mse_base = ((preds_base - target) ** 2).mean(axis=0)
    mse_corr = ((preds_corr - target) ** 2).mean(axis=0)

    var_ratio: float | None
    den = float(np.mean(var_base))
    var_ratio = None if den == 0.0 else float(np.mean(var_corr)) / den

    miss_imp = miss_base = miss_corr = None
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != preds_base.shape:
            raise UsageError("labels must match the prediction matrices' shape")
        miss_base = float(((preds_base > 0.5) != (labels > 0.5)).mean())
        miss_corr = float(((preds_corr > 0.5) != (labels > 0.5)).mean())
        miss_imp = None if miss_base == 0.0 else 1.0 - miss_corr / miss_base

    return MetricReport(
        bias_imp=_ratio_complement(sq_bias_corr, sq_bias_base),
        pred_imp=_ratio_complement(mse_corr, mse_base),
        var_ratio=var_ratio,
        miss_imp=miss_imp,
        sq_bias_base=sq_bias_base,
        sq_bias_corr=sq_bias_corr,
        var_base=var_base,
        var_corr=var_corr,
        mse_base=mse_base,
        mse_corr=mse_corr,
        truth=truth,
        test_points=np.empty((truth.shape[0], 0)) if test_points is None else test_points,
        preds_base=preds_base,
        preds_corr=preds_corr,
        miss_rate_base=miss_base,
        miss_rate_corr=miss_corr,
    )


def _experiment_config(
    model: SimModel,
    n: int,
    B: int,
    B_o: int,
    scheme: ResampleScheme,
    params: SplitParams,
    reps: int,
    n_test: int,
    rng_spec: RngSpec,
    **extra,
) -> dict:
    cfg = {
        "model": model.kind,
        "noise_sd": model.noise_sd,
        "n": int(n),
        "B": int(B),
        "B_o": int(B_o),
        "m": int(scheme.m),
        "replacement": bool(scheme.replacement),
        "min_leaf": int(params.min_leaf),
        "mtry": None if params.mtry is None else int(params.mtry),
        "max_depth": None if params.max_depth is None else int(params.max_depth),
        "reps": int(reps),
        "n_test": int(n_test),
        "seed": int(rng_spec.master_seed),
    }
    cfg.update(extra)
    return cfg


def run_bias_experiment(
    model: SimModel,
    n: int,
    B: int,
    B_o: int,
    scheme: ResampleScheme,
    params: SplitParams,
    reps: int = 100,
    n_test: int = 100,
    rng_spec: RngSpec = RngSpec(0),
    *,
    noisy_test: bool = False,
    center: bool = False,
    n_jobs: int = 1,
) -> MetricReport:
    """Bias/variance/MSE comparison of corrected vs base predictors.

    Draws one fixed test set from the model's input distribution, then
    for each replication generates fresh training data, fits the base
    ensemble and its corrected model, and records predictions at the
    test points.  ``noisy_test`` scores MSE against noisy test
    responses instead of the noiseless truth.
    """
    if model.classification:
        raise UsageError("run_bias_experiment needs a regression kind; "
                         "use run_classification_experiment")
    if int(reps) < 2:
        raise ConfigError(f"need reps >= 2, got {reps}")

    test_rng = derive_stream(rng_spec, 0, role=ROLE_TEST)
    X_test = draw_inputs(model, n_test, test_rng)
    truth = true_mean(model, X_test)
    mse_target = truth
    if noisy_test and model.noise_sd > 0:
        mse_target = truth + test_rng.normal(0.0, model.noise_sd, int(n_test))

    def one_rep(r: int) -> tuple[np.ndarray, np.ndarray]:
        data = generate(model, n, derive_stream(rng_spec, r, role=ROLE_DATA))
        rep_spec = child_spec(rng_spec, ROLE_REP, r)
        base = fit_ensemble(data, B, scheme, params, rep_spec)
        corrected = correct_ensemble(base, data, B_o, rep_spec, center=center)
        return (
            predict_matrix(base, X_test),
            corrected_predict_matrix(corrected, X_test),
        )

    results = _ordered_map(one_rep, range(int(reps)), n_jobs)
    preds_base = np.vstack([pb for pb, _ in results])
    preds_corr = np.vstack([pc for _, pc in results])
    report = summarize_predictions(
        preds_base, preds_corr, truth, mse_target=mse_target, test_points=X_test
    )
    report.config = _experiment_config(
        model, n, B, B_o, scheme, params, reps, n_test, rng_spec,
        noisy_test=bool(noisy_test), center=bool(center),
    )
    return report


def run_classification_experiment(
    model: SimModel,
    n: int,
    B: int,
    B_o: int,
    scheme: ResampleScheme,
    params: SplitParams,
    reps: int = 100,
    n_test: int = 100,
    rng_spec: RngSpec = RngSpec(0),
    *,
    n_jobs: int = 1,
) -> MetricReport:
    """Probability-scale comparison for binary-response models.

    Per replication, labels for the misclassification metric are drawn
    once from true_prob at the fixed test points; both predictors are
    scored against the same labels at the 0.5 threshold.
    """
    if not model.classification:
        raise UsageError("run_classification_experiment needs a logit-* kind")
    if int(reps) < 2:
        raise ConfigError(f"need reps >= 2, got {reps}")

    test_rng = derive_stream(rng_spec, 0, role=ROLE_TEST)
    X_test = draw_inputs(model, n_test, test_rng)
    truth = true_prob(model, X_test)

    def one_rep(r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        data = generate(model, n, derive_stream(rng_spec, r, role=ROLE_DATA))
        rep_spec = child_spec(rng_spec, ROLE_REP, r)
        base = fit_ensemble(data, B, scheme, params, rep_spec)
        corrected = correct_ensemble_classification(base, data, B_o, rep_spec)
        labels = (
            derive_stream(rng_spec, r, role=ROLE_LABEL).random(int(n_test)) < truth
        ).astype(np.float64)
        return (
            estimate_prob_matrix(base, X_test),
            corrected_prob_matrix(corrected, X_test),
            labels,
        )

    results = _ordered_map(one_rep, range(int(reps)), n_jobs)
    preds_base = np.vstack([pb for pb, _, _ in results])
    preds_corr = np.vstack([pc for _, pc, _ in results])
    labels = np.vstack([lb for _, _, lb in results])
    report = summarize_predictions(
        preds_base, preds_corr, truth, test_points=X_test, labels=labels
    )
    report.config = _experiment_config(
        model, n, B, B_o, scheme, params, reps, n_test, rng_spec,
    )
    return report


@dataclass
class CvResult:
    """Pooled k-fold cross-validation errors and improvement ratios."""

    var_y: float
    rf_err: float
    rfc_err: float
    rf_imp: float
    rfc_imp: float
    k: int
    n_retained: int
    fold_rf_err: list[float] = field(default_factory=list)
    fold_rfc_err: list[float] = field(default_factory=list)
    fold_sizes: list[int] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @classmethod
    def from_errors(
        cls, var_y: float, rf_err: float, rfc_err: float, *, k: int = 0, n_retained: int = 0
    ) -> "CvResult":
        # guards: a perfect or constant predictor yields 0 improvement,
        # never a division fault
        rf_imp = 0.0 if var_y == 0.0 else 1.0 - rf_err / var_y
        rfc_imp = 0.0 if rf_err == 0.0 else 1.0 - rfc_err / rf_err
        return cls(
            var_y=float(var_y),
            rf_err=float(rf_err),
            rfc_err=float(rfc_err),
            rf_imp=float(rf_imp),
            rfc_imp=float(rfc_imp),
            k=k,
            n_retained=n_retained,
        )

    def summary(self) -> dict:
        return {
            "var_y": self.var_y,
            "rf_err": self.rf_err,
            "rfc_err": self.rfc_err,
            "rf_imp": self.rf_imp,
            "rfc_imp": self.rfc_imp,
            "config": dict(self.config),
        }


def run_cv(
    data: Dataset,
    k: int,
    B: int,
    B_o: int,
    scheme: ResampleScheme | None,
    params: SplitParams,
    rng_spec: RngSpec = RngSpec(0),
    *,
    fold_mode: str = "contiguous",
    fold_seed: int | None = None,
    center: bool = False,
    n_jobs: int = 1,
) -> CvResult:
    """k-fold CV benchmark of the base and corrected predictors.

    The same folds serve both estimators, and within a fold both train
    on identical index sets (the corrected model wraps the fold's base
    ensemble).  scheme=None bootstraps each fold's full training size.
    Rows dropped to equalize folds take part in neither training nor
    scoring; Var(Y) is computed on the retained rows.
    """
    folds = make_folds(data.n, int(k), fold_mode, fold_seed)

    def one_fold(i: int) -> tuple[np.ndarray, np.ndarray]:
        train_rows = folds.train_rows(i)
        test_rows = folds.fold_rows(i)
        train = data.subset(train_rows)
        fold_scheme = scheme if scheme is not None else ResampleScheme(train.n, True)
        fold_spec = child_spec(rng_spec, ROLE_FOLD, i)
        base = fit_ensemble(train, B, fold_scheme, params, fold_spec)
        corrected = correct_ensemble(base, train, B_o, fold_spec, center=center)
        X_test = data.features[test_rows]
        return (
            predict_matrix(base, X_test),
            corrected_predict_matrix(corrected, X_test),
        )

    results = _ordered_map(one_fold, range(folds.k), n_jobs)

    sq_rf = np.empty(0)
    sq_rfc = np.empty(0)
    fold_rf, fold_rfc, fold_sizes = [], [], []
    for i, (pred_rf, pred_rfc) in enumerate(results):
        y_fold = data.responses[folds.fold_rows(i)]
        err_rf = (y_fold - pred_rf) ** 2
        err_rfc = (y_fold - pred_rfc) ** 2
        sq_rf = np.concatenate([sq_rf, err_rf])
        sq_rfc = np.concatenate([sq_rfc, err_rfc])
        fold_rf.append(float(err_rf.mean()))
        fold_rfc.append(float(err_rfc.mean()))
        fold_sizes.append(int(y_fold.shape[0]))

    y_retained = data.responses[folds.retained]
    var_y = float(np.var(y_retained, ddof=1)) if y_retained.shape[0] > 1 else 0.0
    result = CvResult.from_errors(
        var_y,
        float(sq_rf.mean()),
        float(sq_rfc.mean()),
        k=folds.k,
        n_retained=folds.n_retained,
    )
    result.fold_rf_err = fold_rf
    result.fold_rfc_err = fold_rfc
    result.fold_sizes = fold_sizes
    result.config = {
        "k": folds.k,
        "B": int(B),
        "B_o": int(B_o),
        "m": None if scheme is None else int(scheme.m),
        "replacement": None if scheme is None else bool(scheme.replacement),
        "min_leaf": int(params.min_leaf),
        "mtry": None if params.mtry is None else int(params.mtry),
        "max_depth": None if params.max_depth is None else int(params.max_depth),
        "fold_mode": fold_mode,
        "fold_seed": fold_seed,
        "seed": int(rng_spec.master_seed),
        "n": int(data.n),
        "n_retained": folds.n_retained,
        "center": bool(center),
    }
    return result


@dataclass
class ScalingTable:
    """Empirical variance of the corrected predictor vs shadow size B_o."""

    B_o: np.ndarray
    variances: np.ndarray  # len(B_o) x n_points
    mean_variance: np.ndarray
    test_points: np.ndarray
    config: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "B_o": [int(b) for b in self.B_o],
            "mean_variance": [float(v) for v in self.mean_variance],
            "config": dict(self.config),
        }


def variance_scaling_check(
    data: Dataset,
    base: Ensemble,
    B_o_list: list[int],
    repeats: int,
    test_points: np.ndarray,
    rng_spec: RngSpec = RngSpec(0),
    *,
    center: bool = False,
    n_jobs: int = 1,
) -> ScalingTable:
    """Monte-Carlo variance of the corrected predictor as B_o grows.

    Fixes the data and base ensemble, rebuilds the shadow ``repeats``
    times with fresh streams for each B_o, and reports the empirical
    variance of 2*base - shadow at each test point.  The variance of an
    average of i.i.d. trees scales like 1/B_o, so doubling B_o should
    roughly halve every entry.
    """
    if int(repeats) < 2:
        raise ConfigError(f"need repeats >= 2, got {repeats}")
    if not B_o_list:
        raise ConfigError("B_o_list must not be empty")
    X_test = np.ascontiguousarray(np.asarray(test_points, dtype=np.float64))
    if X_test.ndim != 2 or X_test.shape[1] != data.p:
        raise UsageError(f"test points must be a matrix with {data.p} columns")

    fitted = predict_matrix(base, data.features, n_jobs=n_jobs)
    pool = oob_residuals(base, data).pool()
    base_pred = predict_matrix(base, X_test, n_jobs=n_jobs)

    variances = np.empty((len(B_o_list), X_test.shape[0]))
    for j, B_o in enumerate(B_o_list):
        def one_rebuild(r: int) -> np.ndarray:
            spec_r = child_spec(rng_spec, ROLE_REBUILD, j, r)
            shadow = build_shadow(
                base, data, int(B_o), spec_r,
                residual_pool=pool, fitted_values=fitted, center=center,
            )
            return 2.0 * base_pred - predict_matrix(shadow, X_test)

        corr = np.vstack(_ordered_map(one_rebuild, range(int(repeats)), n_jobs))
        variances[j] = corr.var(axis=0, ddof=1)

    return ScalingTable(
        B_o=np.asarray([int(b) for b in B_o_list]),
        variances=variances,
        mean_variance=variances.mean(axis=1),
        test_points=X_test,
        config={
            "B_o_list": [int(b) for b in B_o_list],
            "repeats": int(repeats),
            "n_points": int(X_test.shape[0]),
            "seed": int(rng_spec.master_seed),
            "B": base.B,
            "n": int(data.n),
            "center": bool(center),
        },
    )


def empirical_quantile(values: np.ndarray, q: float) -> float:
    """Inverse-CDF order statistic: smallest v with ecdf(v) >= q."""
    s = np.sort(np.asarray(values, dtype=np.float64))
    idx = max(int(math.ceil(q * s.shape[0])) - 1, 0)
    return float(s[idx])


@dataclass
class FigureTable:
    """Per-grid-point prediction quantile bands for each subsample size."""

    m_values: list[int]
    grid: np.ndarray
    truth: np.ndarray
    # each maps m -> length-g array
    base_q05: dict
    base_mean: dict
    base_q95: dict
    corr_q05: dict
    corr_mean: dict
    corr_q95: dict
    config: dict = field(default_factory=dict)

    def columns_for(self, m: int) -> tuple[list[str], list[np.ndarray]]:
        names = [
            "x", "truth",
            "base_q05", "base_mean", "base_q95",
            "corr_q05", "corr_mean", "corr_q95",
        ]
        cols = [
            self.grid, self.truth,
            self.base_q05[m], self.base_mean[m], self.base_q95[m],
            self.corr_q05[m], self.corr_mean[m], self.corr_q95[m],
        ]
        return names, cols


def default_grid(size: int = 200) -> np.ndarray:
    """Equally spaced prediction grid on [0, 1]."""
    return np.linspace(0.0, 1.0, int(size))


def emit_figure_data(
    model: SimModel,
    n: int,
    B: int,
    B_o: int,
    m_list: list[int],
    reps: int,
    grid: np.ndarray,
    rng_spec: RngSpec = RngSpec(0),
    *,
    params: SplitParams = SplitParams(),
    center: bool = False,
    n_jobs: int = 1,
) -> FigureTable:
    """Quantile bands of corrected and uncorrected predictions on a grid.

    For each subsample size m (without replacement when m < n), runs
    ``reps`` replications and records, per grid point, the empirical
    5%/mean/95% of both predictors over replications plus the truth.
    """
    if model.classification or model.dim != 1:
        raise UsageError("figure data needs a 1-d regression kind")
    if int(reps) < 2:
        raise ConfigError(f"need reps >= 2, got {reps}")
    if not m_list:
        raise ConfigError("m_list must not be empty")
    grid = np.asarray(grid, dtype=np.float64).reshape(-1)
    X_grid = np.ascontiguousarray(grid[:, None])
    truth = true_mean(model, X_grid)

    base_q05, base_mean, base_q95 = {}, {}, {}
    corr_q05, corr_mean, corr_q95 = {}, {}, {}
    for j, m in enumerate(m_list):
        scheme = ResampleScheme(int(m), replacement=int(m) >= int(n))

        def one_rep(r: int) -> tuple[np.ndarray, np.ndarray]:
            rep_spec = child_spec(rng_spec, ROLE_REP, j, r)
            data = generate(model, n, derive_stream(rep_spec, 0, role=ROLE_DATA))
            base = fit_ensemble(data, B, scheme, params, rep_spec)
            corrected = correct_ensemble(base, data, B_o, rep_spec, center=center)
            return (
                predict_matrix(base, X_grid),
                corrected_predict_matrix(corrected, X_grid),
            )

        results = _ordered_map(one_rep, range(int(reps)), n_jobs)
        pb = np.vstack([x for x, _ in results])
        pc = np.vstack([x for _, x in results])
        base_q05[m] = np.array([empirical_quantile(pb[:, g], 0.05) for g in range(grid.size)])
        base_q95[m] = np.array([empirical_quantile(pb[:, g], 0.95) for g in range(grid.size)])
        base_mean[m] = pb.mean(axis=0)
        corr_q05[m] = np.array([empirical_quantile(pc[:, g], 0.05) for g in range(grid.size)])
        corr_q95[m] = np.array([empirical_quantile(pc[:, g], 0.95) for g in range(grid.size)])
        corr_mean[m] = pc.mean(axis=0)

    return FigureTable(
        m_values=[int(m) for m in m_list],
        grid=grid,
        truth=truth,
        base_q05=base_q05,
        base_mean=base_mean,
        base_q95=base_q95,
        corr_q05=corr_q05,
        corr_mean=corr_mean,
        corr_q95=corr_q95,
        config={
            "model": model.kind,
            "noise_sd": model.noise_sd,
            "n": int(n),
            "B": int(B),
            "B_o": int(B_o),
            "m_list": [int(m) for m in m_list],
            "reps": int(reps),
            "grid_size": int(grid.size),
            "min_leaf": int(params.min_leaf),
            "seed": int(rng_spec.master_seed),
            "center": bool(center),
        },
    )


# ---------------------------------------------------------------------------
# table output: CSV with a leading config comment, JSON summaries


def _format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ";".join(_format_value(x) for x in v) + "]"
    return str(v)


def config_comment(config: dict) -> str:
    """Single comment line recording the resolved configuration."""
    parts = [f"{k}={_format_value(config[k])}" for k in sorted(config)]
    return "# " + " ".join(parts)


def write_csv(path: str, config: dict, colnames: list[str], columns: list[np.ndarray]) -> None:
    """Write columns to CSV with a config comment as the first line."""
    n_rows = len(columns[0]) if columns else 0
    lines = [config_comment(config), ",".join(colnames)]
    for r in range(n_rows):
        lines.append(",".join(_format_value(col[r]) for col in columns))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json_dumps(payload) + "\n")


def json_dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default)


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v)}")


def report_point_table(report: MetricReport) -> tuple[list[str], list[np.ndarray]]:
    """Per-test-point diagnostics as (column names, column arrays)."""
    names: list[str] = []
    cols: list[np.ndarray] = []
    for j in range(report.test_points.shape[1]):
        names.append(f"x{j}")
        cols.append(report.test_points[:, j])
    names += [
        "truth",
        "sq_bias_base", "sq_bias_corr",
        "var_base", "var_corr",
        "mse_base", "mse_corr",
    ]
    cols += [
        report.truth,
        report.sq_bias_base, report.sq_bias_corr,
        report.var_base, report.var_corr,
        report.mse_base, report.mse_corr,
    ]
    return names, cols


def write_report(report: MetricReport, stem: str) -> tuple[str, str]:
    """Write <stem>.csv (per-point rows) and <stem>.json (summary)."""
    csv_path, json_path = f"{stem}.csv", f"{stem}.json"
    names, cols = report_point_table(report)
    write_csv(csv_path, report.config, names, cols)
    write_json(json_path, report.summary())
    return csv_path, json_path
