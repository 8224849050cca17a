"""Hand-built trees and ensembles for exact-value tests."""

import numpy as np

from bcforest import Ensemble, ResampleScheme, SplitParams, Tree


def constant_tree(value, n_features=1, in_bag=(0,)):
    """Single-leaf tree predicting `value` everywhere."""
    return Tree(
        feature=np.array([-1], dtype=np.int32),
        threshold=np.array([0.0]),
        left=np.array([-1], dtype=np.int32),
        right=np.array([-1], dtype=np.int32),
        value=np.array([float(value)]),
        n_sample=np.array([len(in_bag)], dtype=np.int32),
        n_features=n_features,
        in_bag=np.asarray(in_bag, dtype=np.intp),
    )


def stump_tree(feature, threshold, left_value, right_value, n_features=1, in_bag=(0,)):
    """Root split with two leaves: left iff x[feature] <= threshold."""
    return Tree(
        feature=np.array([feature, -1, -1], dtype=np.int32),
        threshold=np.array([float(threshold), 0.0, 0.0]),
        left=np.array([1, -1, -1], dtype=np.int32),
        right=np.array([2, -1, -1], dtype=np.int32),
        value=np.array([0.0, float(left_value), float(right_value)]),
        n_sample=np.array([len(in_bag), 0, 0], dtype=np.int32),
        n_features=n_features,
        in_bag=np.asarray(in_bag, dtype=np.intp),
    )


def manual_ensemble(trees, n_train, n_features=1, binary=False):
    return Ensemble(
        trees=tuple(trees),
        scheme=ResampleScheme(n_train, True),
        split_params=SplitParams(min_leaf=1),
        n_train=n_train,
        n_features=n_features,
        binary_responses=binary,
    )
