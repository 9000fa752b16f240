"""Pure-numpy kernel implementations.

Reference semantics for the compiled twin in ``_ckernels.pyx``: every
reduction here is sequential (cumsum, running sums over features) so both
backends produce bit-identical results.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 256


def pareto_nondominated(scores: np.ndarray) -> np.ndarray:
    """Boolean mask of points not dominated by any other.

    ``scores`` is (n, m), higher is better on every column. Point j dominates
    point i when it is >= on every column and > on at least one.
    """
    s = np.ascontiguousarray(scores, dtype=np.float64)
    n = s.shape[0]
    out = np.ones(n, dtype=bool)
    for start in range(0, n, _BLOCK):
        block = s[start : start + _BLOCK]
        ge_all = (s[:, None, :] >= block[None, :, :]).all(axis=2)
        gt_any = (s[:, None, :] > block[None, :, :]).any(axis=2)
        dominated = (ge_all & gt_any).any(axis=0)
        out[start : start + _BLOCK] = ~dominated
    return out


def best_split(
    x: np.ndarray, y: np.ndarray, w: np.ndarray, min_leaf: int
) -> tuple[int, float, float]:
    """Best weighted-Gini split over the columns of ``x``.

    Candidates are midpoints between consecutive distinct sorted values with
    at least ``min_leaf`` rows on each side. Returns ``(feature, threshold,
    gain)`` with feature ``-1`` when no candidate exists; ties keep the first
    feature in column order, then the smallest threshold.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    m, f = x.shape
    wy = w * y
    # cumsum keeps the accumulation sequential, matching the compiled twin
    total_w = float(np.cumsum(w)[-1])
    total_s = float(np.cumsum(wy)[-1])
    if total_w <= 0.0 or m < 2 * min_leaf:
        return -1, 0.0, 0.0
    parent = 1.0 - (total_s * total_s + (total_w - total_s) * (total_w - total_s)) / (
        total_w * total_w
    )

    best_feature, best_threshold, best_gain = -1, 0.0, -np.inf
    counts = np.arange(1, m, dtype=np.int64)
    for j in range(f):
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        cw = np.cumsum(w[order])[:-1]
        cs = np.cumsum(wy[order])[:-1]
        valid = (xs[:-1] < xs[1:]) & (counts >= min_leaf) & (m - counts >= min_leaf)
        if not valid.any():
            continue
        wl, sl = cw[valid], cs[valid]
        wr, sr = total_w - wl, total_s - sl
        with np.errstate(divide="ignore", invalid="ignore"):
            gl = 1.0 - (sl * sl + (wl - sl) * (wl - sl)) / (wl * wl)
            gr = 1.0 - (sr * sr + (wr - sr) * (wr - sr)) / (wr * wr)
        gl = np.where(wl > 0.0, gl, 0.0)
        gr = np.where(wr > 0.0, gr, 0.0)
        gain = parent - (wl * gl + wr * gr) / total_w
        k = int(np.argmax(gain))
        if gain[k] > best_gain:
            best_gain = float(gain[k])
            pos = np.nonzero(valid)[0][k]
            best_threshold = (xs[pos] + xs[pos + 1]) / 2.0
            best_feature = j
    if best_feature < 0:
        return -1, 0.0, 0.0
    return best_feature, float(best_threshold), best_gain


def knn_indices(x: np.ndarray, k: int) -> np.ndarray:
    """Indices of each row's k nearest Euclidean neighbors, self excluded.

    Distance ties break toward the smaller row index. Squared distances are
    accumulated feature by feature (sequential order).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n, f = x.shape
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    out = np.empty((n, k), dtype=np.int64)
    order_key = np.arange(n)
    for i in range(n):
        d2 = np.zeros(n, dtype=np.float64)
        for c in range(f):
            diff = x[:, c] - x[i, c]
            d2 += diff * diff
        d2[i] = np.inf
        out[i] = np.lexsort((order_key, d2))[:k]
    return out
