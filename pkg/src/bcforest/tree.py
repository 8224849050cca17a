"""CART regression trees with optional per-node random feature subsetting.

Trees are grown greedily: each node draws ``mtry`` candidate features
without replacement, evaluates every midpoint between consecutive
distinct sorted values of each candidate, and keeps the split that
minimizes the weighted sum of child response variances.  Recursion
stops when a node has fewer than ``2 * min_leaf`` observations, zero
response variance, no valid split, or hits ``max_depth``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import Dataset
from .errors import AlgorithmError, ConfigError, UsageError


class FitCounter:
    """Thread-safe count of trees fitted; used to assert cost contracts."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def increment(self) -> None:
        with self._lock:
            self._count += 1

    @property
    def count(self) -> int:
        with self._lock:
            return self._count

    def reset(self) -> None:
        with self._lock:
            self._count = 0


FIT_COUNTER = FitCounter()


def rf_mtry(p: int) -> int:
    """Conventional random-forest regression default: max(p // 3, 1)."""
    return max(int(p) // 3, 1)


@dataclass(frozen=True)
class SplitParams:
    """Split-search settings.

    mtry = None (or p) gives bagged CART trees; mtry < p gives random
    forest trees.  max_depth = None grows fully; max_depth = 0 makes the
    root a leaf.
    """

    min_leaf: int = 5
    mtry: int | None = None
    max_depth: int | None = None

    def __post_init__(self) -> None:
        if int(self.min_leaf) < 1:
            raise ConfigError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.mtry is not None and int(self.mtry) < 1:
            raise ConfigError(f"mtry must be >= 1, got {self.mtry}")
        if self.max_depth is not None and int(self.max_depth) < 0:
            raise ConfigError(f"max_depth must be >= 0, got {self.max_depth}")

    def resolve_mtry(self, p: int) -> int:
        mtry = p if self.mtry is None else int(self.mtry)
        if not 1 <= mtry <= p:
            raise ConfigError(f"mtry={mtry} outside [1, p={p}]")
        return mtry


@dataclass(frozen=True)
class Tree:
    """A fitted tree stored as flat node arrays plus its in-bag sample.

    ``feature[i] < 0`` marks a leaf with mean response ``value[i]``;
    internal nodes route left iff ``x[feature] <= threshold``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_sample: np.ndarray
    n_features: int
    in_bag: np.ndarray

    def __post_init__(self) -> None:
        for name in ("feature", "threshold", "left", "right", "value", "n_sample", "in_bag"):
            getattr(self, name).setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise UsageError(
                f"expected a 2-d matrix with {self.n_features} columns, got shape {X.shape}"
            )
        if not np.isfinite(X).all():
            raise UsageError("prediction points must be finite")
        return self._predict_raw(X)

    def _predict_raw(self, X: np.ndarray) -> np.ndarray:
        # validation-free path for internal loops over many trees
        return _kernels.predict_rows(
            self.feature, self.threshold, self.left, self.right, self.value, X
        )


def _fit_arrays(
    X: np.ndarray,
    y: np.ndarray,
    sample: np.ndarray,
    params: SplitParams,
    rng: np.random.Generator,
) -> Tree:
    p = X.shape[1]
    mtry = params.resolve_mtry(p)
    max_depth = -1 if params.max_depth is None else int(params.max_depth)
    # rng is consumed only when feature subsetting actually randomizes
    seed = np.uint64(rng.integers(0, 2**64, dtype=np.uint64)) if mtry < p else np.uint64(0)

    Xs = np.ascontiguousarray(X[sample])
    ys = np.ascontiguousarray(y[sample])
    feature, threshold, left, right, value, n_sample, n_nodes = _kernels.grow_tree(
        Xs, ys, int(params.min_leaf), mtry, max_depth, seed
    )
    if n_nodes == _kernels.GROW_FAILED:
        raise AlgorithmError("split routing disagreed with split search")
    FIT_COUNTER.increment()
    return Tree(
        feature=feature[:n_nodes].copy(),
        threshold=threshold[:n_nodes].copy(),
        left=left[:n_nodes].copy(),
        right=right[:n_nodes].copy(),
        value=value[:n_nodes].copy(),
        n_sample=n_sample[:n_nodes].copy(),
        n_features=p,
        in_bag=sample.copy(),
    )


def fit_tree(
    data: Dataset,
    sample: np.ndarray,
    params: SplitParams,
    rng: np.random.Generator,
    *,
    responses: np.ndarray | None = None,
) -> Tree:
    """Fit one CART tree on the given index multiset.

    Parameters
    ----------
    data : Dataset
        Training data; only rows listed in ``sample`` are used.
    sample : array of int
        In-bag indices (may repeat).  Stored on the tree as drawn.
    params : SplitParams
        Split-search settings.
    rng : numpy Generator
        Stream for per-node feature subsetting.  Untouched when
        mtry = p, so bagged-tree fitting is deterministic given the
        sample.
    responses : array, optional
        Alternative response vector (length n) overriding
        ``data.responses``; used to fit trees on regenerated responses.
    """
    sample = np.asarray(sample, dtype=np.intp)
    if sample.ndim != 1 or sample.size == 0:
        raise UsageError("sample must be a non-empty 1-d index array")
    if sample.min() < 0 or sample.max() >= data.n:
        raise UsageError(f"sample indices must lie in [0, {data.n})")
    y = data.responses if responses is None else np.asarray(responses, dtype=np.float64)
    if y.shape != (data.n,):
        raise UsageError(f"responses must have shape ({data.n},), got {y.shape}")
    return _fit_arrays(data.features, y, sample, params, rng)


def predict_tree(tree: Tree, x: np.ndarray) -> float:
    """Predict at a single point: the value of the unique leaf x reaches."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != tree.n_features:
        raise UsageError(f"expected {tree.n_features} features, got {x.shape[0]}")
    if not np.isfinite(x).all():
        raise UsageError("prediction point must be finite")
    return float(tree._predict_raw(np.ascontiguousarray(x[None, :]))[0])
