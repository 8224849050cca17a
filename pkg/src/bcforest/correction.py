"""Residual-bootstrap bias correction for tree ensembles.

The estimator averages two ensembles: a base ensemble fitted on the
data, and a second ("shadow") ensemble fitted on responses regenerated
as fitted values plus resampled out-of-bag residuals.  The shadow mean
estimates what bagging does to an already-bagged response surface, so

    corrected(x) = 2 * base(x) - shadow(x)

removes the first-order bias at the cost of only B_o extra trees.  For
binary responses the residual resampling is replaced by a parametric
bootstrap: each shadow tree draws fresh Bernoulli responses from the
base ensemble's estimated probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .ensemble import (
    Ensemble,
    _ordered_map,
    draw_sample,
    oob_residuals,
    predict_matrix,
    predict_point,
)
from .errors import AlgorithmError, ConfigError, UsageError
from .rng import ROLE_SHADOW, RngSpec, derive_stream
from .tree import Tree, _fit_arrays


@dataclass(frozen=True)
class CorrectedModel:
    """Base ensemble, shadow ensemble, and the pieces that built the shadow.

    residual_pool holds the valid OOB residuals (empty for the
    parametric/classification variant); fitted_values holds the base
    ensemble's predictions at the training points.
    """

    base: Ensemble
    shadow: Ensemble
    residual_pool: np.ndarray
    fitted_values: np.ndarray
    B_o: int
    parametric: bool = False

    def __post_init__(self) -> None:
        self.residual_pool.setflags(write=False)
        self.fitted_values.setflags(write=False)
        if self.shadow.B != self.B_o:
            raise ConfigError(f"shadow has {self.shadow.B} trees, expected B_o={self.B_o}")

    def predict_point(self, x: np.ndarray) -> float:
        return corrected_predict(self, x)

    def predict_matrix(self, X: np.ndarray, *, n_jobs: int = 1) -> np.ndarray:
        return corrected_predict_matrix(self, X, n_jobs=n_jobs)


def shadow_responses(
    residual_pool: np.ndarray, fitted_values: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Regenerated responses for one shadow tree.

    Draws n residuals with replacement from the pool (one shared vector
    per shadow tree) and adds them to the fitted values.
    """
    if residual_pool.size == 0:
        raise AlgorithmError("residual pool is empty")
    draws = rng.integers(0, residual_pool.size, size=fitted_values.shape[0])
    return fitted_values + residual_pool[draws]


def classification_shadow_responses(
    p_hat: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Fresh Bernoulli(p_hat) responses for one shadow tree."""
    return (rng.random(p_hat.shape[0]) < p_hat).astype(np.float64)


def _fit_shadow(
    base: Ensemble,
    data: Dataset,
    B_o: int,
    rng_spec: RngSpec,
    make_responses,
    n_jobs: int,
) -> Ensemble:
    if int(B_o) < 1:
        raise ConfigError(f"shadow tree count B_o must be >= 1, got {B_o}")
    if data.n != base.n_train or data.p != base.n_features:
        raise UsageError("dataset shape does not match the base ensemble's training data")

    def build(b: int) -> Tree:
        rng = derive_stream(rng_spec, b, role=ROLE_SHADOW)
        y_star = make_responses(rng)  # step (a): regenerate responses
        sample = draw_sample(base.scheme, data.n, rng)  # step (b): resample pairs
        return _fit_arrays(data.features, y_star, sample, base.split_params, rng)

    trees = _ordered_map(build, range(int(B_o)), n_jobs)
    return Ensemble(
        trees=tuple(trees),
        scheme=base.scheme,
        split_params=base.split_params,
        n_train=data.n,
        n_features=data.p,
        binary_responses=False,
    )


def build_shadow(
    base: Ensemble,
    data: Dataset,
    B_o: int,
    rng_spec: RngSpec,
    *,
    residual_pool: np.ndarray | None = None,
    fitted_values: np.ndarray | None = None,
    center: bool = False,
    n_jobs: int = 1,
) -> Ensemble:
    """Fit the B_o-tree shadow ensemble on residual-bootstrapped responses.

    Shadow tree b draws, from its own stream, first a length-n residual
    vector (with replacement from the valid OOB residuals) and then a
    pair sample under the base ensemble's ResampleScheme; the tree is
    fitted with the base SplitParams.  Residuals are used raw; pass
    center=True to subtract the pool mean for sensitivity runs.

    residual_pool and fitted_values may be supplied to avoid
    recomputation; by default they are derived from the base ensemble.
    """
    if fitted_values is None:
        fitted_values = predict_matrix(base, data.features, n_jobs=n_jobs)
    if residual_pool is None:
        residual_pool = oob_residuals(base, data).pool()
    if residual_pool.size == 0:
        raise AlgorithmError(
            "no valid OOB residuals: every observation is in-bag for every tree"
        )
    pool = residual_pool - residual_pool.mean() if center else residual_pool

    def make_responses(rng: np.random.Generator) -> np.ndarray:
        return shadow_responses(pool, fitted_values, rng)

    return _fit_shadow(base, data, B_o, rng_spec, make_responses, n_jobs)


def build_shadow_classification(
    base: Ensemble,
    data: Dataset,
    B_o: int,
    rng_spec: RngSpec,
    *,
    n_jobs: int = 1,
) -> Ensemble:
    """Shadow ensemble via parametric bootstrap for binary responses.

    Each shadow tree draws Y*_i ~ Bernoulli(estimate_prob(base, X_i))
    independently, then resamples pairs and fits as for regression.
    """
    p_hat = estimate_prob_matrix(base, data.features, n_jobs=n_jobs)

    def make_responses(rng: np.random.Generator) -> np.ndarray:
        return classification_shadow_responses(p_hat, rng)

    return _fit_shadow(base, data, B_o, rng_spec, make_responses, n_jobs)


def correct_ensemble(
    base: Ensemble,
    data: Dataset,
    B_o: int,
    rng_spec: RngSpec,
    *,
    center: bool = False,
    n_jobs: int = 1,
) -> CorrectedModel:
    """Build the full corrected model (OOB pool, fitted values, shadow)."""
    fitted = predict_matrix(base, data.features, n_jobs=n_jobs)
    pool = oob_residuals(base, data).pool()
    shadow = build_shadow(
        base,
        data,
        B_o,
        rng_spec,
        residual_pool=pool,
        fitted_values=fitted,
        center=center,
        n_jobs=n_jobs,
    )
    return CorrectedModel(
        base=base,
        shadow=shadow,
        residual_pool=pool.copy(),
        fitted_values=fitted,
        B_o=int(B_o),
    )


def correct_ensemble_classification(
    base: Ensemble,
    data: Dataset,
    B_o: int,
    rng_spec: RngSpec,
    *,
    n_jobs: int = 1,
) -> CorrectedModel:
    """Corrected model for binary responses (parametric bootstrap shadow)."""
    fitted = estimate_prob_matrix(base, data.features, n_jobs=n_jobs)
    shadow = build_shadow_classification(base, data, B_o, rng_spec, n_jobs=n_jobs)
    return CorrectedModel(
        base=base,
        shadow=shadow,
        residual_pool=np.empty(0),
        fitted_values=fitted,
        B_o=int(B_o),
        parametric=True,
    )


def corrected_predict(model: CorrectedModel, x: np.ndarray) -> float:
    """Exactly 2 * base(x) - shadow(x)."""
    return 2.0 * predict_point(model.base, x) - predict_point(model.shadow, x)


def corrected_predict_matrix(
    model: CorrectedModel, X: np.ndarray, *, n_jobs: int = 1
) -> np.ndarray:
    base = predict_matrix(model.base, X, n_jobs=n_jobs)
    shadow = predict_matrix(model.shadow, X, n_jobs=n_jobs)
    return 2.0 * base - shadow


def estimate_prob(base: Ensemble, x: np.ndarray) -> float:
    """Ensemble mean prediction clamped to [0, 1] (binary responses only)."""
    if not base.binary_responses:
        raise UsageError("estimate_prob requires an ensemble fitted on {0,1} responses")
    return float(min(1.0, max(0.0, predict_point(base, x))))


def estimate_prob_matrix(base: Ensemble, X: np.ndarray, *, n_jobs: int = 1) -> np.ndarray:
    if not base.binary_responses:
        raise UsageError("estimate_prob requires an ensemble fitted on {0,1} responses")
    return np.clip(predict_matrix(base, X, n_jobs=n_jobs), 0.0, 1.0)


def corrected_prob(model: CorrectedModel, x: np.ndarray) -> float:
    """clamp(2 * base(x) - shadow(x), 0, 1); classify at threshold 0.5."""
    return float(np.clip(corrected_predict(model, x), 0.0, 1.0))


def corrected_prob_matrix(
    model: CorrectedModel, X: np.ndarray, *, n_jobs: int = 1
) -> np.ndarray:
    return np.clip(corrected_predict_matrix(model, X, n_jobs=n_jobs), 0.0, 1.0)
