"""Compiled kernels for tree growth and prediction.

Everything here is deterministic given its arguments and releases the
GIL, so tree fitting can run on worker threads.  The only randomness is
per-node feature subsetting, driven by a splitmix64 state seeded from
the caller's stream; all other draws happen outside the kernel.
"""

import numpy as np
from numba import njit

_U64 = np.uint64
_SM_GAMMA = _U64(0x9E3779B97F4A7C15)
_SM_MIX1 = _U64(0xBF58476D1CE4E5B9)
_SM_MIX2 = _U64(0x94D049BB133111EB)

# sentinel returned in n_nodes on internal inconsistency
GROW_FAILED = -1

# Two candidate splits can tie exactly (duplicated in-bag indices make
# different partitions of the same response multiset common), while their
# prefix-sum gains differ by rounding noise.  Gains within this relative
# tolerance of the incumbent are treated as ties, so the scan order --
# ascending feature, then ascending threshold -- decides, as documented.
TIE_REL_TOL = 1e-11


@njit(cache=True, nogil=True)
def _splitmix64(state):
    state = state + _SM_GAMMA
    z = state
    z = (z ^ (z >> _U64(30))) * _SM_MIX1
    z = (z ^ (z >> _U64(27))) * _SM_MIX2
    z = z ^ (z >> _U64(31))
    return state, z


@njit(cache=True, nogil=True)
def grow_tree(X, y, min_leaf, mtry, max_depth, seed):
    """Grow a CART regression tree on (X, y); returns flat node arrays.

    Split choice minimizes the summed child squared error, equivalently
    maximizes S_L^2/n_L + S_R^2/n_R over valid positions.  Candidate
    thresholds are midpoints of consecutive distinct sorted values; ties
    (gains within TIE_REL_TOL of the incumbent, relative to the node's
    (sum |y|)^2 scale) resolve to the lowest feature index, then the
    smallest threshold.  max_depth < 0 means unlimited.
    """
    m, p = X.shape
    cap = 2 * m + 1
    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    value = np.zeros(cap, dtype=np.float64)
    count = np.zeros(cap, dtype=np.int32)

    idx = np.arange(m)
    stack = np.empty((cap, 4), dtype=np.int64)  # node, start, end, depth
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    state = seed

    feats = np.arange(p)
    vals = np.empty(m, dtype=np.float64)
    sy = np.empty(m, dtype=np.float64)

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        k = end - start

        tot = 0.0
        for i in range(start, end):
            tot += y[idx[i]]
        value[node] = tot / k
        count[node] = k

        if k < 2 * min_leaf:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue
        ylo = y[idx[start]]
        yhi = ylo
        abs_sum = abs(ylo)
        for i in range(start + 1, end):
            v = y[idx[i]]
            if v < ylo:
                ylo = v
            elif v > yhi:
                yhi = v
            abs_sum += abs(v)
        if ylo == yhi:
            continue
        tie_tol = TIE_REL_TOL * abs_sum * abs_sum

        n_cand = p
        if mtry < p:
            for i in range(p):
                feats[i] = i
            for i in range(mtry):
                state, z = _splitmix64(state)
                j = i + int(z % _U64(p - i))
                tmp = feats[i]
                feats[i] = feats[j]
                feats[j] = tmp
            # scan candidates in ascending feature order so equal scores
            # break toward the lowest feature index
            for a in range(1, mtry):
                key = feats[a]
                b = a - 1
                while b >= 0 and feats[b] > key:
                    feats[b + 1] = feats[b]
                    b -= 1
                feats[b + 1] = key
            n_cand = mtry

        best_gain = -np.inf
        best_f = -1
        best_t = 0.0
        best_nl = -1
        for fi in range(n_cand):
            f = feats[fi]
            for i in range(k):
                vals[i] = X[idx[start + i], f]
            order = np.argsort(vals[:k])
            for i in range(k):
                sy[i] = y[idx[start + order[i]]]
            s_left = 0.0
            for i in range(1, k):
                s_left += sy[i - 1]
                if i < min_leaf or k - i < min_leaf:
                    continue
                a = vals[order[i - 1]]
                b = vals[order[i]]
                if a == b:
                    continue
                s_right = tot - s_left
                gain = s_left * s_left / i + s_right * s_right / (k - i)
                if gain > best_gain + tie_tol:
                    t = a + (b - a) * 0.5
                    if t >= b:  # midpoint rounded up to b; fall back so a stays left
                        t = a
                    best_gain = gain
                    best_f = f
                    best_t = t
                    best_nl = i
        if best_f < 0:
            continue

        # partition idx[start:end] by the same rule prediction uses
        i = start
        j = end - 1
        while i <= j:
            if X[idx[i], best_f] <= best_t:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        n_left = i - start
        if n_left != best_nl:
            return feature, threshold, left, right, value, count, GROW_FAILED

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_t
        left[node] = lid
        right[node] = rid
        stack[top, 0] = lid
        stack[top, 1] = start
        stack[top, 2] = start + n_left
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = rid
        stack[top, 1] = start + n_left
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1

    return feature, threshold, left, right, value, count, n_nodes


@njit(cache=True, nogil=True)
def predict_rows(feature, threshold, left, right, value, X):
    """Route each row of X to its leaf; go left iff x[feature] <= threshold."""
    q = X.shape[0]
    out = np.empty(q, dtype=np.float64)
    for r in range(q):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = value[node]
    return out


@njit(cache=True, nogil=True)
def partial_fisher_yates(offsets, n):
    """First-m prefix of a Fisher-Yates shuffle of 0..n-1.

    offsets[i] must be uniform on [0, n-i); the caller draws them from
    its own stream so the kernel stays deterministic.
    """
    m = offsets.shape[0]
    pool = np.arange(n)
    for i in range(m):
        j = i + int(offsets[i])
        tmp = pool[i]
        pool[i] = pool[j]
        pool[j] = tmp
    return pool[:m].copy()


def warm_up() -> None:
    """Trigger compilation of all kernels (cached across processes)."""
    X = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0], [3.0, 1.5]])
    y = np.array([0.0, 1.0, 2.0, 3.0])
    f, t, l, r, v, c, n = grow_tree(X, y, 1, 1, -1, _U64(1))
    predict_rows(f[:n], t[:n], l[:n], r[:n], v[:n], X)
    partial_fisher_yates(np.zeros(2, dtype=np.int64), 4)
