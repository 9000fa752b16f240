"""Bias mitigation: the reweighing preprocessor and the group-threshold
postprocessor, the two pipeline slots the search grid can fill."""

from __future__ import annotations

import numpy as np

from .errors import MitigationError
from .learners import decide

SELECTION_RATE = "selection_rate"
TRUE_POSITIVE_RATE = "true_positive_rate"
THRESHOLD_TARGETS = (SELECTION_RATE, TRUE_POSITIVE_RATE)


def reweigh(labels: np.ndarray, groups: np.ndarray) -> np.ndarray:
    """Instance weights that make group and label statistically independent.

    Every instance in cell (g, y) gets P(g)·P(y) / P(g, y); unoccupied cells
    assign nothing, so no division by zero can occur.
    """
    labels = np.asarray(labels)
    groups = np.asarray(groups, dtype=bool)
    n = len(labels)
    for name, members in (("privileged", groups), ("unprivileged", ~groups)):
        if not members.any():
            raise MitigationError(f"cannot reweigh: {name} group is empty")

    weights = np.ones(n, dtype=np.float64)
    for g in (True, False):
        for y in (1, 0):
            cell = (groups == g) & (labels == y)
            n_cell = int(cell.sum())
            if n_cell == 0:
                continue
            n_g = int((groups == g).sum())
            n_y = int((labels == y).sum())
            weights[cell] = (n_g * n_y) / (n * n_cell)
    return weights


def _rate(scores, threshold, labels, target):
    selected = scores >= threshold
    if target == SELECTION_RATE:
        return float(selected.mean())
    positives = labels == 1
    if not positives.any():
        raise MitigationError("true_positive_rate target needs positive labels in both groups")
    return float(selected[positives].mean())


def fit_group_thresholds(
    scores: np.ndarray,
    groups: np.ndarray,
    base_threshold: float,
    target: str = SELECTION_RATE,
    labels: np.ndarray | None = None,
) -> tuple[float, float]:
    """Pick the unprivileged threshold that best equalizes the target rate.

    The privileged group keeps ``base_threshold``. Candidates are the observed
    unprivileged scores plus the base threshold itself (so the result can
    never be worse than doing nothing); ties prefer the candidate closest to
    the base threshold, then the larger one.
    """
    scores = np.asarray(scores, dtype=np.float64)
    groups = np.asarray(groups, dtype=bool)
    if target not in THRESHOLD_TARGETS:
        raise MitigationError(f"unknown threshold target {target!r}")
    if target == TRUE_POSITIVE_RATE and labels is None:
        raise MitigationError("true_positive_rate target requires labels")
    for name, members in (("privileged", groups), ("unprivileged", ~groups)):
        if not members.any():
            raise MitigationError(f"cannot fit group thresholds: {name} group is empty")

    labels_p = labels[groups] if labels is not None else None
    labels_u = labels[~groups] if labels is not None else None
    rate_p = _rate(scores[groups], base_threshold, labels_p, target)

    scores_u = scores[~groups]
    candidates = sorted(set(scores_u.tolist()) | {float(base_threshold)})
    best = None
    best_key = None
    for t in candidates:
        gap = abs(_rate(scores_u, t, labels_u, target) - rate_p)
        key = (gap, abs(t - base_threshold), -t)
        if best_key is None or key < best_key:
            best, best_key = t, key
    return float(base_threshold), float(best)


def group_threshold(
    scores: np.ndarray,
    groups: np.ndarray,
    base_threshold: float,
    target: str = SELECTION_RATE,
    labels: np.ndarray | None = None,
) -> np.ndarray:
    """Decisions with per-group thresholds fitted on these same scores."""
    t_priv, t_unpriv = fit_group_thresholds(scores, groups, base_threshold, target, labels)
    return apply_group_thresholds(scores, groups, t_priv, t_unpriv)


def apply_group_thresholds(
    scores: np.ndarray, groups: np.ndarray, t_priv: float, t_unpriv: float
) -> np.ndarray:
    groups = np.asarray(groups, dtype=bool)
    decisions = decide(scores, t_priv)
    decisions[~groups] = decide(np.asarray(scores)[~groups], t_unpriv)
    return decisions
