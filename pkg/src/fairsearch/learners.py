"""Classifier families producing probabilistic scores over encoded matrices.

Three families: plain logistic regression, a fairness-regularized logistic
variant that penalizes the squared covariance between privileged-group
membership and the decision-boundary margin, and a random forest of
weighted-Gini CART trees. All training is deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DivergenceError, HyperparameterError

LOGISTIC = "logistic"
FAIR_LOGISTIC = "fair_logistic"
FOREST = "forest"
FAMILIES = (LOGISTIC, FAIR_LOGISTIC, FOREST)

_DEFAULTS = {
    LOGISTIC: {"learning_rate": 0.1, "l2_penalty": 0.0, "epochs": 500},
    FAIR_LOGISTIC: {
        "learning_rate": 0.1,
        "l2_penalty": 0.0,
        "epochs": 500,
        "fairness_weight": 1.0,
    },
    FOREST: {
        "n_trees": 16,
        "max_depth": None,
        "min_leaf": 1,
        "feature_subsample_fraction": 1.0,
        "bootstrap": True,
    },
}


def _check_range(family, key, value):
    ok = True
    if key == "learning_rate":
        ok = isinstance(value, (int, float)) and 0.0 < value <= 100.0
    elif key in ("l2_penalty", "fairness_weight"):
        ok = isinstance(value, (int, float)) and value >= 0.0
    elif key == "epochs":
        ok = isinstance(value, int) and 0 <= value <= 1_000_000
    elif key == "n_trees":
        ok = isinstance(value, int) and 1 <= value <= 10_000
    elif key == "max_depth":
        ok = value is None or (isinstance(value, int) and value >= 1)
    elif key == "min_leaf":
        ok = isinstance(value, int) and value >= 1
    elif key == "feature_subsample_fraction":
        ok = isinstance(value, (int, float)) and 0.0 < value <= 1.0
    elif key == "bootstrap":
        ok = isinstance(value, bool)
    if not ok:
        raise HyperparameterError(f"{family}: {key}={value!r} outside its declared range")


def resolve_hyperparameters(family: str, overrides: dict | None = None) -> dict:
    """Merge overrides into the family defaults, rejecting unknown keys."""
    if family not in _DEFAULTS:
        raise HyperparameterError(f"unknown model family {family!r}")
    resolved = dict(_DEFAULTS[family])
    for key, value in (overrides or {}).items():
        if key not in resolved:
            raise HyperparameterError(f"{family}: unknown hyperparameter {key!r}")
        if isinstance(value, bool) and key != "bootstrap":
            raise HyperparameterError(f"{family}: {key}={value!r} outside its declared range")
        resolved[key] = value
    for key, value in resolved.items():
        _check_range(family, key, value)
    return resolved


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True, eq=False)
class LogisticModel:
    family: str
    weights: np.ndarray
    intercept: float
    seed: int
    epochs_run: int
    final_loss: float

    def scores(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(x @ self.weights + self.intercept)


@dataclass(frozen=True, eq=False)
class Tree:
    """Axis-aligned binary tree in flat-array form; ``feature`` is -1 at
    leaves and ``value`` holds the weighted favorable fraction."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def scores(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(x.shape[0], dtype=np.int32)
        while True:
            feat = self.feature[node]
            active = np.nonzero(feat >= 0)[0]
            if active.size == 0:
                return self.value[node]
            at = node[active]
            go_left = x[active, feat[active]] < self.threshold[at]
            node[active] = np.where(go_left, self.left[at], self.right[at])


@dataclass(frozen=True, eq=False)
class ForestModel:
    family: str
    trees: tuple[Tree, ...]
    seed: int

    def scores(self, x: np.ndarray) -> np.ndarray:
        total = np.zeros(x.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.scores(x)
        return total / len(self.trees)


def _weighted_log_loss(z: np.ndarray, y: np.ndarray, sw: np.ndarray, total_w: float) -> float:
    # softplus(z) - y*z is the numerically stable per-row log loss
    return float(np.dot(sw, np.logaddexp(0.0, z) - y * z) / total_w)


def _margin_covariance_coeffs(sw, groups, total_w):
    g = groups.astype(np.float64)
    g_mean = float(np.dot(sw, g) / total_w)
    return sw * (g - g_mean) / total_w


def fair_logistic_objective(
    weights: np.ndarray,
    intercept: float,
    x: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray,
    groups: np.ndarray,
    l2_penalty: float,
    fairness_weight: float,
) -> float:
    """Weighted log loss + l2·‖w‖² + η·C², where C is the weighted covariance
    between the privileged indicator and the margin w·x + b."""
    total_w = float(sample_weight.sum())
    z = x @ weights + intercept
    loss = _weighted_log_loss(z, y, sample_weight, total_w)
    loss += l2_penalty * float(np.dot(weights, weights))
    if fairness_weight > 0.0:
        a = _margin_covariance_coeffs(sample_weight, groups, total_w)
        c = float(np.dot(a, z))
        loss += fairness_weight * c * c
    return loss


def fair_logistic_gradient(
    weights: np.ndarray,
    intercept: float,
    x: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray,
    groups: np.ndarray,
    l2_penalty: float,
    fairness_weight: float,
) -> tuple[np.ndarray, float]:
    """Analytic gradient of :func:`fair_logistic_objective` w.r.t. (w, b)."""
    total_w = float(sample_weight.sum())
    z = x @ weights + intercept
    p = _sigmoid(z)
    residual = sample_weight * (p - y)
    gw = x.T @ residual / total_w + 2.0 * l2_penalty * weights
    gb = float(residual.sum() / total_w)
    if fairness_weight > 0.0:
        a = _margin_covariance_coeffs(sample_weight, groups, total_w)
        c = float(np.dot(a, z))
        gw = gw + 2.0 * fairness_weight * c * (x.T @ a)
        gb += 2.0 * fairness_weight * c * float(a.sum())
    return gw, gb


def _fit_logistic(family, x, y, w, hp, seed, groups):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sw = np.asarray(w, dtype=np.float64)
    n, d = x.shape
    if n == 0 or len(y) != n or len(sw) != n:
        raise ValueError("features, labels, and weights must be nonempty and aligned")
    if not np.isfinite(x).all():
        raise ValueError("non-finite values in the feature matrix")
    if sw.sum() <= 0.0:
        raise ValueError("instance weights sum to zero")

    lr = float(hp["learning_rate"])
    l2 = float(hp["l2_penalty"])
    eta = float(hp.get("fairness_weight", 0.0))
    g = groups if eta > 0.0 else np.zeros(n, dtype=bool)

    weights = np.zeros(d, dtype=np.float64)
    intercept = 0.0
    for epoch in range(hp["epochs"]):
        gw, gb = fair_logistic_gradient(weights, intercept, x, y, sw, g, l2, eta)
        weights = weights - lr * gw
        intercept = intercept - lr * gb
        loss = fair_logistic_objective(weights, intercept, x, y, sw, g, l2, eta)
        if not math.isfinite(loss):
            raise DivergenceError(f"{family}: non-finite training loss", epoch + 1)
    final = fair_logistic_objective(weights, intercept, x, y, sw, g, l2, eta)
    return LogisticModel(
        family=family,
        weights=weights,
        intercept=intercept,
        seed=seed,
        epochs_run=hp["epochs"],
        final_loss=final,
    )


def train_logistic(x, y, w, hp: dict | None = None, seed: int = 0) -> LogisticModel:
    """Full-batch gradient descent on weighted log loss + l2, starting from
    zero weights, for a fixed epoch count."""
    return _fit_logistic(LOGISTIC, x, y, w, resolve_hyperparameters(LOGISTIC, hp), seed, None)


def train_fair_logistic(x, y, w, groups, hp: dict | None = None, seed: int = 0) -> LogisticModel:
    """Like :func:`train_logistic` plus the covariance penalty η·C²; with
    η = 0 the result is identical to the plain learner."""
    resolved = resolve_hyperparameters(FAIR_LOGISTIC, hp)
    groups = np.asarray(groups, dtype=bool)
    return _fit_logistic(FAIR_LOGISTIC, x, y, w, resolved, seed, groups)


def _grow_tree(x, y, w, rng, max_depth, min_leaf, subsample_fraction):
    n, d = x.shape
    n_sub = min(d, max(1, int(round(subsample_fraction * d))))
    feature, threshold, left, right, value = [], [], [], [], []

    # explicit stack: depth can approach the row count on memorizing trees
    stack = [(np.arange(n), 0, -1, False)]
    while stack:
        indices, depth, parent, is_left = stack.pop()
        node_id = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node_id

        wsub = w[indices]
        ysub = y[indices]
        wsum = float(np.cumsum(wsub)[-1])
        fav = float(np.cumsum(wsub * ysub)[-1])
        node_value = fav / wsum if wsum > 0.0 else 0.5
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(node_value)

        pure = ysub.max() == ysub.min()
        depth_ok = max_depth is None or depth < max_depth
        if pure or not depth_ok or len(indices) < 2 * min_leaf:
            continue
        feats = rng.permutation(d)[:n_sub]
        sub = np.ascontiguousarray(x[np.ix_(indices, feats)])
        j, thr, _gain = _kernels.best_split(sub, ysub, wsub, min_leaf)
        if j < 0:
            continue
        feat = int(feats[j])
        feature[node_id] = feat
        threshold[node_id] = thr
        go_left = x[indices, feat] < thr
        # push right first so the left child is grown (and numbered) first
        stack.append((indices[~go_left], depth + 1, node_id, False))
        stack.append((indices[go_left], depth + 1, node_id, True))

    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
    )


def train_forest(x, y, w, hp: dict | None = None, seed: int = 0) -> ForestModel:
    """CART-style forest: weighted-Gini splits over a per-node random feature
    subset, optional weight-proportional bootstrap, leaf values the weighted
    favorable fraction. Per-tree seeds spawn from the master seed."""
    resolved = resolve_hyperparameters(FOREST, hp)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sw = np.asarray(w, dtype=np.float64)
    if x.shape[0] == 0:
        raise ValueError("empty training set")
    if not np.isfinite(x).all():
        raise ValueError("non-finite values in the feature matrix")
    if sw.sum() <= 0.0:
        raise ValueError("instance weights sum to zero")

    n = x.shape[0]
    trees = []
    for child in np.random.SeedSequence(seed).spawn(resolved["n_trees"]):
        rng = np.random.default_rng(child)
        if resolved["bootstrap"]:
            idx = rng.choice(n, size=n, replace=True, p=sw / sw.sum())
            xb, yb, wb = x[idx], y[idx], np.ones(n, dtype=np.float64)
        else:
            xb, yb, wb = x, y, sw
        trees.append(
            _grow_tree(
                xb,
                yb,
                wb,
                rng,
                resolved["max_depth"],
                resolved["min_leaf"],
                resolved["feature_subsample_fraction"],
            )
        )
    return ForestModel(family=FOREST, trees=tuple(trees), seed=seed)


def decide(scores: np.ndarray, threshold: float) -> np.ndarray:
    """Favorable (1) exactly when score >= threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    return (np.asarray(scores) >= threshold).astype(np.int64)
