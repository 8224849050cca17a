"""Ensembles and out-of-bag residuals against membership oracles.

Hand-built constant trees pin the arithmetic exactly; fitted ensembles
are checked against an independent double loop over (observation, tree)
membership.
"""

import math

import numpy as np
import pytest

from bcforest import (
    AlgorithmError,
    ConfigError,
    Dataset,
    ResampleScheme,
    RngSpec,
    ROLE_DATA,
    SplitParams,
    UsageError,
    derive_stream,
    draw_sample,
    fit_ensemble,
    oob_mse,
    oob_residuals,
    predict_matrix,
    predict_point,
    predict_tree,
)
from helpers import constant_tree, manual_ensemble, stump_tree


def toy_data(n=30, p=2, seed=5, index=0):
    rng = derive_stream(RngSpec(seed), index, role=ROLE_DATA)
    X = rng.random((n, p))
    y = X[:, 0] + rng.normal(0.0, 0.1, n)
    return Dataset(X, y)


# --- prediction arithmetic --------------------------------------------------

def test_mean_of_three_constant_trees():
    ens = manual_ensemble([constant_tree(v) for v in (10.0, 20.0, 30.0)], n_train=3)
    assert predict_point(ens, [0.3]) == 20.0


def test_identical_trees_average_to_themselves():
    ens = manual_ensemble([constant_tree(7.5) for _ in range(5)], n_train=4)
    assert predict_point(ens, [0.0]) == 7.5


def tree_predictions(tree, X):
    return np.array([predict_tree(tree, row) for row in X])


def test_singleton_ensemble_equals_its_tree():
    data = toy_data(n=25)
    ens = fit_ensemble(data, 1, ResampleScheme(25, False), SplitParams(min_leaf=2), RngSpec(3))
    X = toy_data(n=10, index=1).features
    assert np.array_equal(predict_matrix(ens, X), tree_predictions(ens.trees[0], X))


def test_constant_responses_predict_that_constant():
    X = toy_data(n=40).features
    data = Dataset(X, np.full(40, 3.7))
    for B, scheme in [(1, ResampleScheme(40, True)), (7, ResampleScheme(10, False))]:
        ens = fit_ensemble(data, B, scheme, SplitParams(), RngSpec(1))
        preds = predict_matrix(ens, X)
        assert preds == pytest.approx(np.full(40, 3.7), rel=1e-15)


def test_prediction_matches_manual_tree_average():
    data = toy_data(n=60)
    ens = fit_ensemble(data, 13, ResampleScheme(60, True), SplitParams(), RngSpec(9))
    X = toy_data(n=15, index=2).features
    manual = np.array([
        math.fsum(predict_tree(t, X[r]) for t in ens.trees) / ens.B
        for r in range(15)
    ])
    assert predict_matrix(ens, X) == pytest.approx(manual, abs=1e-12)


def test_prediction_between_tree_extremes():
    data = toy_data(n=80)
    ens = fit_ensemble(data, 20, ResampleScheme(40, False), SplitParams(), RngSpec(11))
    X = toy_data(n=50, index=3).features
    per_tree = np.array([tree_predictions(t, X) for t in ens.trees])
    preds = predict_matrix(ens, X)
    assert np.all(preds >= per_tree.min(axis=0) - 1e-12)
    assert np.all(preds <= per_tree.max(axis=0) + 1e-12)


def test_parallel_training_is_bit_identical():
    data = toy_data(n=50)
    X = toy_data(n=10, index=4).features
    seq = fit_ensemble(data, 20, ResampleScheme(50, True), SplitParams(), RngSpec(2), n_jobs=1)
    par = fit_ensemble(data, 20, ResampleScheme(50, True), SplitParams(), RngSpec(2), n_jobs=4)
    assert np.array_equal(predict_matrix(seq, X), predict_matrix(par, X))
    for a, b in zip(seq.trees, par.trees):
        assert np.array_equal(a.in_bag, b.in_bag)
        assert np.array_equal(a.value, b.value)


def test_parallel_prediction_is_bit_identical():
    data = toy_data(n=50)
    ens = fit_ensemble(data, 150, ResampleScheme(50, True), SplitParams(), RngSpec(2))
    X = toy_data(n=30, index=5).features
    assert np.array_equal(
        predict_matrix(ens, X, n_jobs=1), predict_matrix(ens, X, n_jobs=3)
    )


def test_predict_validation():
    ens = manual_ensemble([constant_tree(1.0, n_features=2)], n_train=3, n_features=2)
    with pytest.raises(UsageError):
        predict_point(ens, [0.1])
    with pytest.raises(UsageError):
        predict_point(ens, [0.1, np.nan])
    with pytest.raises(UsageError):
        predict_matrix(ens, np.zeros((4, 3)))


def test_binary_response_flag():
    X = toy_data(n=20).features
    binary = fit_ensemble(
        Dataset(X, (X[:, 0] > 0.5).astype(float)), 3,
        ResampleScheme(20, True), SplitParams(), RngSpec(1),
    )
    assert binary.binary_responses
    real = fit_ensemble(
        Dataset(X, X[:, 0]), 3, ResampleScheme(20, True), SplitParams(), RngSpec(1)
    )
    assert not real.binary_responses


def test_fit_validation():
    data = toy_data(n=10)
    with pytest.raises(ConfigError):
        fit_ensemble(data, 0, ResampleScheme(10, True), SplitParams(), RngSpec(1))
    with pytest.raises(ConfigError):
        fit_ensemble(data, 2, ResampleScheme(11, False), SplitParams(), RngSpec(1))
    with pytest.raises(ConfigError):
        ResampleScheme(0, True)
    with pytest.raises(ConfigError):
        manual_ensemble([], n_train=3)


# --- sampling ---------------------------------------------------------------

def test_draw_sample_sizes_and_ranges():
    rng = derive_stream(RngSpec(4), 0)
    boot = draw_sample(ResampleScheme(18, True), 20, rng)
    assert boot.shape == (18,) and boot.min() >= 0 and boot.max() < 20
    sub = draw_sample(ResampleScheme(12, False), 20, rng)
    assert sub.shape == (12,)
    assert len(set(sub.tolist())) == 12  # without replacement: all distinct
    assert sub.min() >= 0 and sub.max() < 20
    with pytest.raises(ConfigError):
        draw_sample(ResampleScheme(21, False), 20, rng)


def test_draw_sample_deterministic_per_stream():
    a = draw_sample(ResampleScheme(10, False), 30, derive_stream(RngSpec(8), 2))
    b = draw_sample(ResampleScheme(10, False), 30, derive_stream(RngSpec(8), 2))
    c = draw_sample(ResampleScheme(10, False), 30, derive_stream(RngSpec(8), 3))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_subsample_inclusion_is_uniform():
    # each index should appear with frequency m/n
    n, m, draws = 10, 5, 4000
    counts = np.zeros(n)
    for i in range(draws):
        rng = derive_stream(RngSpec(13), i)
        counts[draw_sample(ResampleScheme(m, False), n, rng)] += 1
    freq = counts / draws
    assert np.all(np.abs(freq - m / n) < 0.03)


def test_in_bag_stored_with_m_entries():
    data = toy_data(n=25)
    for scheme in (ResampleScheme(25, True), ResampleScheme(9, False)):
        ens = fit_ensemble(data, 6, scheme, SplitParams(), RngSpec(5))
        for t in ens.trees:
            assert t.in_bag.shape == (scheme.m,)
    assert len(ens.in_bag_sets) == 6


# --- out-of-bag residuals ---------------------------------------------------

def test_oob_single_excluding_tree():
    # tree in-bag sets {0,1}, {1,2}, {0,2}; only tree 1 excludes obs 0
    trees = [
        constant_tree(10.0, in_bag=(0, 1)),
        constant_tree(20.0, in_bag=(1, 2)),
        constant_tree(30.0, in_bag=(0, 2)),
    ]
    ens = manual_ensemble(trees, n_train=3)
    data = Dataset(np.array([[0.1], [0.2], [0.3]]), np.array([25.0, 35.0, 15.0]))
    result = oob_residuals(ens, data)
    assert result.valid.all()
    assert result.excluded_count == 0
    assert result.residuals[0] == 25.0 - 20.0  # only the middle tree excludes 0
    assert result.residuals[1] == 35.0 - 30.0
    assert result.residuals[2] == 15.0 - 10.0
    assert np.array_equal(result.pool(), result.residuals)


def test_oob_constant_trees_shift_responses():
    trees = [constant_tree(4.0, in_bag=(i,)) for i in range(5)]
    ens = manual_ensemble(trees, n_train=5)
    y = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    data = Dataset(np.linspace(0, 1, 5).reshape(-1, 1), y)
    result = oob_residuals(ens, data)
    assert result.valid.all()
    assert np.array_equal(result.residuals, y - 4.0)


def test_oob_mask_when_always_in_bag():
    trees = [constant_tree(0.0, in_bag=(0, 1)), constant_tree(0.0, in_bag=(0, 2))]
    ens = manual_ensemble(trees, n_train=3)
    data = Dataset(np.zeros((3, 1)), np.array([1.0, 2.0, 3.0]))
    result = oob_residuals(ens, data)
    assert not result.valid[0] and np.isnan(result.residuals[0])
    assert result.valid[1] and result.valid[2]
    assert result.excluded_count == 1
    assert np.array_equal(result.pool(), [2.0, 3.0])


def test_oob_matches_double_loop_oracle():
    data = toy_data(n=40, p=3)
    ens = fit_ensemble(data, 30, ResampleScheme(40, True), SplitParams(), RngSpec(17))
    result = oob_residuals(ens, data)
    for i in range(data.n):
        preds = [
            predict_tree(t, data.features[i])
            for t in ens.trees
            if i not in set(t.in_bag.tolist())
        ]
        if preds:
            expected = data.responses[i] - math.fsum(preds) / len(preds)
            assert result.valid[i]
            assert result.residuals[i] == pytest.approx(expected, abs=1e-12)
        else:
            assert not result.valid[i]


def test_oob_shape_mismatch():
    ens = manual_ensemble([constant_tree(0.0)], n_train=3)
    with pytest.raises(UsageError):
        oob_residuals(ens, toy_data(n=4, p=1))


def test_oob_fraction_near_bootstrap_limit():
    # P(i out of bag) = (1 - 1/n)^n -> e^{-1}
    data = toy_data(n=300)
    ens = fit_ensemble(data, 50, ResampleScheme(300, True), SplitParams(), RngSpec(23))
    fractions = [
        np.mean(np.bincount(t.in_bag, minlength=300) == 0) for t in ens.trees
    ]
    assert abs(np.mean(fractions) - math.exp(-1)) < 0.03


def test_no_exclusions_at_practical_size():
    # P(always in-bag) = (1 - e^{-1})^B is negligible at B=100
    for seed in range(20):
        data = toy_data(n=500, p=2, seed=seed + 100)
        ens = fit_ensemble(
            data, 100, ResampleScheme(500, True),
            SplitParams(max_depth=1), RngSpec(seed),
        )
        assert oob_residuals(ens, data).excluded_count == 0


# --- oob_mse ----------------------------------------------------------------

def test_oob_mse_of_constant_residuals():
    trees = [constant_tree(0.0, in_bag=(0,)), constant_tree(0.0, in_bag=(1,))]
    ens = manual_ensemble(trees, n_train=2)
    data = Dataset(np.array([[0.0], [1.0]]), np.array([2.0, 2.0]))
    assert oob_mse(ens, data) == 4.0


def test_oob_mse_perfect_fit():
    X = toy_data(n=30).features
    data = Dataset(X, np.full(30, 1.25))
    ens = fit_ensemble(data, 10, ResampleScheme(30, True), SplitParams(), RngSpec(6))
    assert oob_mse(ens, data) == 0.0


def test_oob_mse_matches_recomputation():
    data = toy_data(n=50)
    ens = fit_ensemble(data, 25, ResampleScheme(50, True), SplitParams(), RngSpec(19))
    result = oob_residuals(ens, data)
    assert oob_mse(ens, data) == pytest.approx(np.mean(result.pool() ** 2), abs=1e-15)


def test_oob_mse_all_masked():
    # m=n without replacement puts every observation in every bag
    data = toy_data(n=15)
    ens = fit_ensemble(data, 3, ResampleScheme(15, False), SplitParams(), RngSpec(7))
    with pytest.raises(AlgorithmError):
        oob_mse(ens, data)
