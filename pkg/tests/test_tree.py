"""CART trees against an independent exhaustive split-search oracle.

The oracle re-derives the best split by brute force: every feature,
every midpoint between consecutive distinct sorted values, scored by
the gain S_L^2/n_L + S_R^2/n_R computed with exact summation.  Scans
run in ascending (feature, threshold) order and a candidate replaces
the incumbent only when it wins by more than the tie tolerance (1e-11
relative to the node's (sum |y|)^2 scale), so equal and near-equal
scores resolve to the lowest feature index, then the smallest
threshold: the documented tie-break.  Midpoints use t = a + (b - a)/2
with the same fall-back to a if rounding reaches b, which is the
shared candidate-threshold definition, not a copy of the
implementation.
"""

import math

import numpy as np
import pytest

from bcforest import (
    ConfigError,
    Dataset,
    SplitParams,
    UsageError,
    derive_stream,
    fit_tree,
    predict_tree,
    rf_mtry,
    RngSpec,
)
from helpers import constant_tree, stump_tree


def oracle_sse(values):
    m = sum(values) / len(values)
    return sum((v - m) ** 2 for v in values)


def oracle_midpoint(a, b):
    t = a + (b - a) * 0.5
    return a if t >= b else t


def oracle_best_split(X, y, idx, min_leaf, features):
    """Exhaustive O(n^2 p) search maximizing S_L^2/n_L + S_R^2/n_R."""
    tie_tol = 1e-11 * math.fsum(abs(y[i]) for i in idx) ** 2
    best = None
    best_gain = -math.inf
    for f in sorted(features):
        values = sorted({X[i, f] for i in idx})
        for a, b in zip(values, values[1:]):
            t = oracle_midpoint(a, b)
            left = [i for i in idx if X[i, f] <= t]
            right = [i for i in idx if X[i, f] > t]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            s_left = math.fsum(y[i] for i in left)
            s_right = math.fsum(y[i] for i in right)
            gain = s_left**2 / len(left) + s_right**2 / len(right)
            if gain > best_gain + tie_tol:
                best_gain = gain
                best = (f, t, len(left), len(right))
    return best


def node_segments(tree, X):
    """Route the in-bag multiset down the stored splits."""
    segments = {0: list(tree.in_bag)}
    for node in range(tree.n_nodes):
        if tree.feature[node] < 0:
            continue
        f, t = tree.feature[node], tree.threshold[node]
        idx = segments[node]
        segments[int(tree.left[node])] = [i for i in idx if X[i, f] <= t]
        segments[int(tree.right[node])] = [i for i in idx if X[i, f] > t]
    return segments


def node_depths(tree):
    depths = {0: 0}
    for node in range(tree.n_nodes):
        if tree.feature[node] >= 0:
            depths[int(tree.left[node])] = depths[node] + 1
            depths[int(tree.right[node])] = depths[node] + 1
    return depths


def check_tree_against_oracle(tree, data, params):
    """Verify every node: leaf values, stop conditions, and split choice."""
    X, y = data.features, data.responses
    segments = node_segments(tree, X)
    depths = node_depths(tree)
    assert set(segments) == set(range(tree.n_nodes))
    for node, idx in segments.items():
        k = len(idx)
        assert k == tree.n_sample[node]
        assert k > 0
        assert tree.value[node] == pytest.approx(sum(y[i] for i in idx) / k, abs=1e-12)
        responses = [y[i] for i in idx]
        split = oracle_best_split(X, y, idx, params.min_leaf, range(data.p))
        depth_capped = params.max_depth is not None and depths[node] >= params.max_depth
        if tree.feature[node] < 0:
            # a leaf must be justified by one of the defined stop rules
            assert (
                k < 2 * params.min_leaf
                or min(responses) == max(responses)
                or split is None
                or depth_capped
            )
        else:
            assert not depth_capped
            assert split is not None
            f, t, n_left, n_right = split
            assert int(tree.feature[node]) == f
            assert tree.threshold[node] == t
            assert len(segments[int(tree.left[node])]) == n_left
            assert len(segments[int(tree.right[node])]) == n_right
            assert min(n_left, n_right) >= params.min_leaf
            child_sse = oracle_sse([y[i] for i in segments[int(tree.left[node])]]) + \
                oracle_sse([y[i] for i in segments[int(tree.right[node])]])
            assert child_sse <= oracle_sse(responses) + 1e-9


def random_instance(rng, quantize):
    n = int(rng.integers(2, 41))
    p = int(rng.integers(1, 5))
    X = rng.random((n, p))
    if quantize:  # duplicated feature values exercise distinct-midpoint handling
        X = np.floor(X * 4) / 4
    y = rng.standard_normal(n)
    if quantize:
        y = np.round(y, 1)
    min_leaf = int(rng.choice([1, 2, 5]))
    sample = rng.integers(0, n, size=n) if rng.random() < 0.5 else np.arange(n)
    return Dataset(X, y), SplitParams(min_leaf=min_leaf), sample.astype(np.intp)


class TestSplitOracle:
    def test_constant_responses_single_leaf(self):
        data = Dataset(np.linspace(0, 1, 12).reshape(-1, 1), np.full(12, 3.5))
        tree = fit_tree(data, np.arange(12), SplitParams(min_leaf=1), derive_stream(RngSpec(0), 0))
        assert tree.n_nodes == 1
        assert tree.n_leaves == 1
        assert predict_tree(tree, [0.3]) == 3.5
        assert predict_tree(tree, [7.0]) == 3.5

    def test_perfect_separation_root_split(self):
        data = Dataset(np.array([[0.0], [0.0], [1.0], [1.0]]), np.array([0.0, 0.0, 10.0, 10.0]))
        tree = fit_tree(data, np.arange(4), SplitParams(min_leaf=2, mtry=1),
                        derive_stream(RngSpec(0), 0))
        assert tree.n_nodes == 3
        assert tree.feature[0] == 0
        assert tree.threshold[0] == 0.5
        assert sorted(tree.value[1:]) == [0.0, 10.0]
        assert predict_tree(tree, [0.2]) == 0.0
        assert predict_tree(tree, [0.9]) == 10.0

    def test_root_split_matches_oracle_30x3(self):
        rng = np.random.default_rng(17)
        data = Dataset(rng.random((30, 3)), rng.standard_normal(30))
        tree = fit_tree(data, np.arange(30), SplitParams(min_leaf=5, mtry=3),
                        derive_stream(RngSpec(0), 0))
        f, t, _, _ = oracle_best_split(data.features, data.responses, range(30), 5, range(3))
        assert int(tree.feature[0]) == f
        assert tree.threshold[0] == t

    def test_every_node_matches_oracle_100_instances(self):
        rng = np.random.default_rng(2024)
        for trial in range(100):
            data, params, sample = random_instance(rng, quantize=trial % 3 == 0)
            tree = fit_tree(data, sample, params, derive_stream(RngSpec(trial), 0))
            check_tree_against_oracle(tree, data, params)

    def test_threshold_tie_breaks_small(self):
        # t=0.5 and t=2.5 score identically; the smaller threshold wins
        data = Dataset(np.array([[0.0], [1.0], [2.0], [3.0]]), np.array([0.0, 10.0, 10.0, 0.0]))
        tree = fit_tree(data, np.arange(4), SplitParams(min_leaf=1), derive_stream(RngSpec(0), 0))
        assert tree.feature[0] == 0
        assert tree.threshold[0] == 0.5

    def test_feature_tie_breaks_low(self):
        # identical columns: equal scores must resolve to feature 0
        X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
        data = Dataset(X, np.array([0.0, 0.0, 10.0, 10.0]))
        tree = fit_tree(data, np.arange(4), SplitParams(min_leaf=1), derive_stream(RngSpec(0), 0))
        assert tree.feature[0] == 0


class TestStops:
    def test_min_leaf_respected_everywhere(self):
        rng = np.random.default_rng(5)
        data = Dataset(rng.random((60, 2)), rng.standard_normal(60))
        for min_leaf in (1, 3, 10):
            tree = fit_tree(data, np.arange(60), SplitParams(min_leaf=min_leaf),
                            derive_stream(RngSpec(0), 0))
            segments = node_segments(tree, data.features)
            for node, idx in segments.items():
                if tree.feature[node] < 0:
                    continue
                assert len(segments[int(tree.left[node])]) >= min_leaf
                assert len(segments[int(tree.right[node])]) >= min_leaf

    def test_max_depth_zero_is_root_leaf(self):
        rng = np.random.default_rng(6)
        data = Dataset(rng.random((20, 1)), rng.standard_normal(20))
        tree = fit_tree(data, np.arange(20), SplitParams(min_leaf=1, max_depth=0),
                        derive_stream(RngSpec(0), 0))
        assert tree.n_nodes == 1
        assert tree.value[0] == pytest.approx(data.responses.mean())

    def test_max_depth_caps_depth(self):
        rng = np.random.default_rng(7)
        data = Dataset(rng.random((100, 2)), rng.standard_normal(100))
        tree = fit_tree(data, np.arange(100), SplitParams(min_leaf=1, max_depth=3),
                        derive_stream(RngSpec(0), 0))
        assert max(node_depths(tree).values()) <= 3
        deeper = fit_tree(data, np.arange(100), SplitParams(min_leaf=1),
                          derive_stream(RngSpec(0), 0))
        assert deeper.n_nodes > tree.n_nodes


class TestPrediction:
    def test_single_leaf_constant(self):
        tree = constant_tree(2.0)
        assert predict_tree(tree, [0.0]) == 2.0
        assert predict_tree(tree, [123.4]) == 2.0

    def test_stump_routing(self):
        tree = stump_tree(0, 0.5, 0.0, 10.0)
        assert predict_tree(tree, [0.2]) == 0.0
        assert predict_tree(tree, [0.5]) == 0.0  # boundary goes left
        assert predict_tree(tree, [0.9]) == 10.0

    def test_interpolation_zero_in_bag_residuals(self):
        rng = np.random.default_rng(8)
        data = Dataset(rng.random((25, 3)), rng.standard_normal(25))  # distinct rows
        tree = fit_tree(data, np.arange(25), SplitParams(min_leaf=1),
                        derive_stream(RngSpec(0), 0))
        preds = tree.predict(data.features)
        assert np.array_equal(preds, data.responses)

    def test_piecewise_constant_between_thresholds(self):
        rng = np.random.default_rng(9)
        data = Dataset(rng.random((40, 1)), rng.standard_normal(40))
        tree = fit_tree(data, np.arange(40), SplitParams(min_leaf=2),
                        derive_stream(RngSpec(0), 0))
        cuts = np.sort(tree.threshold[tree.feature >= 0])
        inner = (cuts[:-1] + cuts[1:]) / 2
        for x in inner:
            nudge = 1e-12
            assert predict_tree(tree, [x]) == predict_tree(tree, [x + nudge])

    def test_matrix_and_point_prediction_agree(self):
        rng = np.random.default_rng(10)
        data = Dataset(rng.random((30, 2)), rng.standard_normal(30))
        tree = fit_tree(data, np.arange(30), SplitParams(), derive_stream(RngSpec(0), 0))
        pts = rng.random((7, 2))
        preds = tree.predict(pts)
        for r in range(7):
            assert predict_tree(tree, pts[r]) == preds[r]

    def test_prediction_validation(self):
        tree = stump_tree(0, 0.5, 0.0, 10.0, n_features=2)
        with pytest.raises(UsageError):
            predict_tree(tree, [0.1])
        with pytest.raises(UsageError):
            predict_tree(tree, [np.nan, 0.0])
        with pytest.raises(UsageError):
            tree.predict(np.array([[0.1]]))


class TestDeterminismAndRandomness:
    def test_full_mtry_is_deterministic_and_ignores_stream(self):
        rng = np.random.default_rng(12)
        data = Dataset(rng.random((50, 3)), rng.standard_normal(50))
        t1 = fit_tree(data, np.arange(50), SplitParams(), derive_stream(RngSpec(1), 0))
        t2 = fit_tree(data, np.arange(50), SplitParams(), derive_stream(RngSpec(99), 5))
        assert np.array_equal(t1.feature, t2.feature)
        assert np.array_equal(t1.threshold, t2.threshold)
        assert np.array_equal(t1.value, t2.value)

    def test_full_mtry_leaves_stream_untouched(self):
        rng = np.random.default_rng(12)
        data = Dataset(rng.random((30, 2)), rng.standard_normal(30))
        stream = derive_stream(RngSpec(3), 0)
        before = derive_stream(RngSpec(3), 0).random(5)
        fit_tree(data, np.arange(30), SplitParams(), stream)
        assert np.array_equal(stream.random(5), before)

    def test_reduced_mtry_same_seed_same_tree(self):
        rng = np.random.default_rng(13)
        data = Dataset(rng.random((60, 4)), rng.standard_normal(60))
        params = SplitParams(mtry=2)
        t1 = fit_tree(data, np.arange(60), params, derive_stream(RngSpec(4), 1))
        t2 = fit_tree(data, np.arange(60), params, derive_stream(RngSpec(4), 1))
        assert np.array_equal(t1.feature, t2.feature)
        assert np.array_equal(t1.threshold, t2.threshold)

    def test_reduced_mtry_varies_with_seed(self):
        rng = np.random.default_rng(14)
        data = Dataset(rng.random((200, 4)), rng.standard_normal(200))
        params = SplitParams(mtry=1)
        trees = [
            fit_tree(data, np.arange(200), params, derive_stream(RngSpec(s), 0))
            for s in range(6)
        ]
        roots = {int(t.feature[0]) for t in trees}
        assert len(roots) > 1

    def test_reduced_mtry_splits_still_oracle_optimal_within_subset(self):
        # with mtry=1 and p=1 the subset is forced, so the oracle applies
        rng = np.random.default_rng(15)
        data = Dataset(rng.random((30, 1)), rng.standard_normal(30))
        tree = fit_tree(data, np.arange(30), SplitParams(min_leaf=3, mtry=1),
                        derive_stream(RngSpec(0), 0))
        check_tree_against_oracle(tree, data, SplitParams(min_leaf=3, mtry=1))


class TestParamsAndValidation:
    def test_rf_mtry_convention(self):
        assert rf_mtry(1) == 1
        assert rf_mtry(3) == 1
        assert rf_mtry(9) == 3
        assert rf_mtry(10) == 3

    def test_split_params_validation(self):
        with pytest.raises(ConfigError):
            SplitParams(min_leaf=0)
        with pytest.raises(ConfigError):
            SplitParams(mtry=0)
        with pytest.raises(ConfigError):
            SplitParams(max_depth=-1)
        with pytest.raises(ConfigError):
            SplitParams(mtry=5).resolve_mtry(3)
        assert SplitParams().resolve_mtry(4) == 4

    def test_fit_tree_sample_validation(self):
        data = Dataset(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]))
        stream = derive_stream(RngSpec(0), 0)
        with pytest.raises(UsageError):
            fit_tree(data, np.array([], dtype=np.intp), SplitParams(), stream)
        with pytest.raises(UsageError):
            fit_tree(data, np.array([0, 2]), SplitParams(), stream)
        with pytest.raises(UsageError):
            fit_tree(data, np.array([-1]), SplitParams(), stream)

    def test_responses_override(self):
        data = Dataset(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]))
        alt = np.array([5.0, 5.0])
        tree = fit_tree(data, np.arange(2), SplitParams(min_leaf=1),
                        derive_stream(RngSpec(0), 0), responses=alt)
        assert predict_tree(tree, [0.5]) == 5.0
        with pytest.raises(UsageError):
            fit_tree(data, np.arange(2), SplitParams(), derive_stream(RngSpec(0), 0),
                     responses=np.array([1.0]))

    def test_in_bag_stored_as_drawn(self):
        data = Dataset(np.array([[0.0], [1.0], [2.0]]), np.array([0.0, 1.0, 2.0]))
        sample = np.array([2, 0, 2], dtype=np.intp)
        tree = fit_tree(data, sample, SplitParams(min_leaf=1), derive_stream(RngSpec(0), 0))
        assert np.array_equal(tree.in_bag, sample)
