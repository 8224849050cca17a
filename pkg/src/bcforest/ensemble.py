"""Ensembles of CART trees: bagging, subsampling, and out-of-bag residuals.

The ensemble predictor is the arithmetic mean of its trees.  Tree b is
fitted on a sample drawn with the stream addressed (role, b), which
makes training reproducible from the master seed and invariant to how
tree fitting is scheduled across threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .data import Dataset
from .errors import AlgorithmError, ConfigError, UsageError
from .rng import ROLE_BASE, RngSpec, derive_stream
from .tree import SplitParams, Tree, _fit_arrays


def resolve_jobs(n_jobs: int) -> int:
    if n_jobs <= 0:
        return os.cpu_count() or 1
    return int(n_jobs)


def _ordered_map(fn: Callable, indices: Sequence[int], n_jobs: int) -> list:
    """Apply fn over indices, in parallel when asked, results in index order."""
    n_jobs = resolve_jobs(n_jobs)
    if n_jobs == 1 or len(indices) <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, indices))


@dataclass(frozen=True)
class ResampleScheme:
    """Per-tree sampling rule: size m, with or without replacement."""

    m: int
    replacement: bool

    def __post_init__(self) -> None:
        if int(self.m) < 1:
            raise ConfigError(f"sample size m must be >= 1, got {self.m}")

    def validate(self, n: int) -> None:
        if self.m > n:
            raise ConfigError(f"sample size m={self.m} exceeds n={n}")


def draw_sample(scheme: ResampleScheme, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one in-bag index multiset from the given stream.

    Bootstrap uses m independent uniform index draws; subsampling uses a
    partial Fisher-Yates shuffle (offsets drawn from the same stream).
    """
    scheme.validate(n)
    if scheme.replacement:
        return rng.integers(0, n, size=scheme.m).astype(np.intp)
    offsets = rng.integers(0, n - np.arange(scheme.m))
    return _kernels.partial_fisher_yates(offsets.astype(np.int64), n).astype(np.intp)


@dataclass(frozen=True)
class Ensemble:
    """B fitted trees plus the scheme and split settings that built them."""

    trees: tuple[Tree, ...]
    scheme: ResampleScheme
    split_params: SplitParams
    n_train: int
    n_features: int
    binary_responses: bool = False

    def __post_init__(self) -> None:
        if len(self.trees) < 1:
            raise ConfigError("an ensemble needs at least one tree")

    @property
    def B(self) -> int:
        return len(self.trees)

    @property
    def in_bag_sets(self) -> tuple[np.ndarray, ...]:
        return tuple(t.in_bag for t in self.trees)

    def predict_point(self, x: np.ndarray) -> float:
        return predict_point(self, x)

    def predict_matrix(self, X: np.ndarray, *, n_jobs: int = 1) -> np.ndarray:
        return predict_matrix(self, X, n_jobs=n_jobs)


class _KahanAccumulator:
    """Compensated elementwise summation in fixed order.

    Keeps ensemble averages deterministic and drift-free even for very
    large B (well past the 1e4 regime where naive accumulation drifts).
    """

    def __init__(self, size: int) -> None:
        self.total = np.zeros(size)
        self._comp = np.zeros(size)

    def add(self, values: np.ndarray) -> None:
        t = values - self._comp
        s = self.total + t
        self._comp = (s - self.total) - t
        self.total = s


def _check_matrix(ens: Ensemble, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2 or X.shape[1] != ens.n_features:
        raise UsageError(
            f"expected a 2-d matrix with {ens.n_features} columns, got shape {X.shape}"
        )
    if not np.isfinite(X).all():
        raise UsageError("prediction points must be finite")
    return X


_PREDICT_CHUNK = 64  # trees predicted per parallel batch; bounds memory


def _tree_prediction_sum(
    trees: Iterable[Tree], X: np.ndarray, n_jobs: int
) -> _KahanAccumulator:
    acc = _KahanAccumulator(X.shape[0])
    trees = list(trees)
    for lo in range(0, len(trees), _PREDICT_CHUNK):
        chunk = trees[lo : lo + _PREDICT_CHUNK]
        preds = _ordered_map(lambda t: t._predict_raw(X), chunk, n_jobs)
        for p in preds:
            acc.add(p)
    return acc


def fit_ensemble(
    data: Dataset,
    B: int,
    scheme: ResampleScheme,
    params: SplitParams,
    rng_spec: RngSpec,
    *,
    n_jobs: int = 1,
    role: int = ROLE_BASE,
) -> Ensemble:
    """Fit B trees, tree b on a sample drawn from stream (role, b).

    Results are bit-identical for any n_jobs because every tree owns its
    derived stream and results are collected in tree order.
    """
    if int(B) < 1:
        raise ConfigError(f"tree count B must be >= 1, got {B}")
    scheme.validate(data.n)
    params.resolve_mtry(data.p)

    def build(b: int) -> Tree:
        rng = derive_stream(rng_spec, b, role=role)
        sample = draw_sample(scheme, data.n, rng)
        return _fit_arrays(data.features, data.responses, sample, params, rng)

    trees = _ordered_map(build, range(int(B)), n_jobs)
    binary = bool(np.isin(data.responses, (0.0, 1.0)).all())
    return Ensemble(
        trees=tuple(trees),
        scheme=scheme,
        split_params=params,
        n_train=data.n,
        n_features=data.p,
        binary_responses=binary,
    )


def predict_point(ens: Ensemble, x: np.ndarray) -> float:
    """Arithmetic mean of the B tree predictions at one point."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != ens.n_features:
        raise UsageError(f"expected {ens.n_features} features, got {x.shape[0]}")
    if not np.isfinite(x).all():
        raise UsageError("prediction point must be finite")
    return float(predict_matrix(ens, np.ascontiguousarray(x[None, :]))[0])


def predict_matrix(ens: Ensemble, X: np.ndarray, *, n_jobs: int = 1) -> np.ndarray:
    """Ensemble predictions for each row of X."""
    X = _check_matrix(ens, X)
    acc = _tree_prediction_sum(ens.trees, X, n_jobs)
    return acc.total / ens.B


@dataclass(frozen=True)
class OobResult:
    """Out-of-bag residuals with a validity mask.

    residuals[i] is Y_i minus the mean prediction at X_i over trees
    whose in-bag set excludes i; NaN where no tree excludes i (masked
    invalid, counted in excluded_count).
    """

    residuals: np.ndarray
    valid: np.ndarray
    excluded_count: int

    def pool(self) -> np.ndarray:
        """The valid residuals, ready for resampling."""
        return self.residuals[self.valid]


def oob_residuals(ens: Ensemble, data: Dataset) -> OobResult:
    """Out-of-bag residuals of the ensemble on its training data."""
    if data.n != ens.n_train or data.p != ens.n_features:
        raise UsageError("dataset shape does not match the ensemble's training data")
    X = data.features
    oob_sum = np.zeros(data.n)
    oob_cnt = np.zeros(data.n, dtype=np.int64)
    for tree in ens.trees:
        in_bag = np.bincount(tree.in_bag, minlength=data.n)
        out = in_bag == 0
        if not out.any():
            continue
        preds = tree._predict_raw(X)
        oob_sum[out] += preds[out]
        oob_cnt[out] += 1
    valid = oob_cnt > 0
    residuals = np.full(data.n, np.nan)
    residuals[valid] = data.responses[valid] - oob_sum[valid] / oob_cnt[valid]
    return OobResult(
        residuals=residuals,
        valid=valid,
        excluded_count=int((~valid).sum()),
    )


def oob_mse(ens: Ensemble, data: Dataset) -> float:
    """Mean squared valid OOB residual; errors when every point is masked."""
    result = oob_residuals(ens, data)
    if not result.valid.any():
        raise AlgorithmError("every observation is in-bag for every tree; OOB MSE undefined")
    return float(np.mean(result.pool() ** 2))
