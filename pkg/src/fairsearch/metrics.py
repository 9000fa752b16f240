"""Group confusion statistics, the fairness metric catalog, quality metrics,
and canonical higher-is-better scores used for dominance.

Sign convention: signed raw differences are unprivileged minus privileged.
Each metric either yields a defined value or an explicit undefined flag;
NaN/inf never leak out.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .data import Dataset, Encoder
from .errors import MetricError
from .learners import decide

QUALITY_METRICS = ("accuracy", "precision", "recall", "f1")
CONFUSION_METRICS = (
    "disparate_impact",
    "statistical_parity",
    "equal_opportunity",
    "predictive_equality",
    "average_odds",
    "treatment_equality",
    "conditional_use_accuracy",
    "overall_accuracy_equality",
    "representation_disparity",
)
METRIC_IDS = QUALITY_METRICS + CONFUSION_METRICS + ("causal_flip", "consistency")

# display name and orientation note per metric id, mirrored into plot exports
METRIC_INFO = {
    "accuracy": ("Accuracy", "higher is better; canonical = raw"),
    "precision": ("Precision", "higher is better; canonical = raw"),
    "recall": ("Recall", "higher is better; canonical = raw"),
    "f1": ("F1", "higher is better; canonical = raw"),
    "disparate_impact": ("Disparate impact", "1 is ideal; canonical = min(raw, 1/raw)"),
    "statistical_parity": ("Statistical parity difference", "0 is ideal; canonical = 1 - |raw|"),
    "equal_opportunity": ("Equal opportunity difference", "0 is ideal; canonical = 1 - |raw|"),
    "predictive_equality": ("Predictive equality difference", "0 is ideal; canonical = 1 - |raw|"),
    "average_odds": ("Average odds difference", "0 is ideal; canonical = 1 - |raw|"),
    "treatment_equality": ("Treatment equality difference", "0 is ideal; canonical = 1 - |raw|"),
    "conditional_use_accuracy": (
        "Conditional use accuracy difference",
        "0 is ideal; canonical = 1 - |raw|",
    ),
    "overall_accuracy_equality": (
        "Overall accuracy difference",
        "0 is ideal; canonical = 1 - |raw|",
    ),
    "representation_disparity": (
        "Representation disparity",
        "lower is better; canonical = 1 - raw",
    ),
    "causal_flip": ("Causal flip rate", "lower is better; canonical = 1 - raw"),
    "consistency": ("Consistency", "higher is better; canonical = raw"),
}


@dataclass(frozen=True)
class MetricValue:
    """Raw value plus its canonical [0, 1] higher-is-better score; both are
    None when the metric is undefined on the inputs."""

    metric: str
    raw: float | None
    score: float | None
    defined: bool

    @classmethod
    def of(cls, metric: str, raw: float, score: float) -> "MetricValue":
        return cls(metric, float(raw), float(score), True)

    @classmethod
    def undefined(cls, metric: str) -> "MetricValue":
        return cls(metric, None, None, False)


@dataclass(frozen=True)
class GroupCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def selection_rate(self) -> float:
        return (self.tp + self.fp) / self.n

    @property
    def tpr(self) -> float | None:
        pos = self.tp + self.fn
        return self.tp / pos if pos else None

    @property
    def fpr(self) -> float | None:
        neg = self.fp + self.tn
        return self.fp / neg if neg else None

    @property
    def precision(self) -> float | None:
        pred_pos = self.tp + self.fp
        return self.tp / pred_pos if pred_pos else None

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n

    @property
    def error(self) -> float:
        return 1.0 - self.accuracy


@dataclass(frozen=True)
class GroupConfusion:
    privileged: GroupCounts
    unprivileged: GroupCounts

    def swap(self) -> "GroupConfusion":
        return GroupConfusion(privileged=self.unprivileged, unprivileged=self.privileged)


def group_confusion(decisions, labels, groups) -> GroupConfusion:
    """Exact per-group TP/FP/TN/FN counts."""
    decisions = np.asarray(decisions)
    labels = np.asarray(labels)
    groups = np.asarray(groups, dtype=bool)
    if not (len(decisions) == len(labels) == len(groups)):
        raise MetricError("decisions, labels, and groups must have equal lengths")
    counts = {}
    for name, members in (("privileged", groups), ("unprivileged", ~groups)):
        if not members.any():
            raise MetricError(f"{name} group is empty")
        d, y = decisions[members], labels[members]
        counts[name] = GroupCounts(
            tp=int(((d == 1) & (y == 1)).sum()),
            fp=int(((d == 1) & (y == 0)).sum()),
            tn=int(((d == 0) & (y == 0)).sum()),
            fn=int(((d == 0) & (y == 1)).sum()),
        )
    return GroupConfusion(privileged=counts["privileged"], unprivileged=counts["unprivileged"])


def canonical_score(metric: str, raw: float) -> float:
    """Map a raw metric value to [0, 1] with higher always better."""
    if metric in ("accuracy", "precision", "recall", "f1", "consistency"):
        return float(raw)
    if metric == "disparate_impact":
        if raw == 0.0:
            return 0.0
        return float(min(raw, 1.0 / raw))
    if metric in ("representation_disparity", "causal_flip"):
        return float(min(max(1.0 - raw, 0.0), 1.0))
    if metric in CONFUSION_METRICS:
        return float(min(max(1.0 - abs(raw), 0.0), 1.0))
    raise MetricError(f"unknown metric id {metric!r}")


def _signed(metric: str, u: float | None, p: float | None) -> MetricValue:
    if u is None or p is None:
        return MetricValue.undefined(metric)
    raw = u - p
    return MetricValue.of(metric, raw, canonical_score(metric, raw))


def fairness_metric(metric: str, gc: GroupConfusion) -> MetricValue:
    """Evaluate one confusion-based fairness metric.

    Raw formulas (u = unprivileged, p = privileged):
      disparate_impact           SR_u / SR_p
      statistical_parity         SR_u - SR_p
      equal_opportunity          TPR_u - TPR_p
      predictive_equality        FPR_u - FPR_p
      average_odds               ((FPR_u - FPR_p) + (TPR_u - TPR_p)) / 2
      treatment_equality         FP_u/FN_u - FP_p/FN_p
      conditional_use_accuracy   precision_u - precision_p
      overall_accuracy_equality  accuracy_u - accuracy_p
      representation_disparity   max(error_p, error_u)
    """
    p, u = gc.privileged, gc.unprivileged
    if metric == "disparate_impact":
        if p.selection_rate == 0.0:
            return MetricValue.undefined(metric)
        raw = u.selection_rate / p.selection_rate
        # canonical computed as min/max of the two rates so that swapping the
        # group labels yields a bit-identical score
        lo = min(u.selection_rate, p.selection_rate)
        hi = max(u.selection_rate, p.selection_rate)
        return MetricValue.of(metric, raw, lo / hi)
    if metric == "statistical_parity":
        return _signed(metric, u.selection_rate, p.selection_rate)
    if metric == "equal_opportunity":
        return _signed(metric, u.tpr, p.tpr)
    if metric == "predictive_equality":
        return _signed(metric, u.fpr, p.fpr)
    if metric == "average_odds":
        if None in (u.fpr, p.fpr, u.tpr, p.tpr):
            return MetricValue.undefined(metric)
        raw = ((u.fpr - p.fpr) + (u.tpr - p.tpr)) / 2.0
        return MetricValue.of(metric, raw, canonical_score(metric, raw))
    if metric == "treatment_equality":
        if u.fn == 0 or p.fn == 0:
            return MetricValue.undefined(metric)
        raw = u.fp / u.fn - p.fp / p.fn
        return MetricValue.of(metric, raw, canonical_score(metric, raw))
    if metric == "conditional_use_accuracy":
        return _signed(metric, u.precision, p.precision)
    if metric == "overall_accuracy_equality":
        return _signed(metric, u.accuracy, p.accuracy)
    if metric == "representation_disparity":
        raw = max(p.error, u.error)
        return MetricValue.of(metric, raw, canonical_score(metric, raw))
    raise MetricError(f"unknown confusion-based metric id {metric!r}")


def quality_metrics(decisions, labels) -> dict[str, MetricValue]:
    """Standard binary accuracy/precision/recall/f1 with favorable = positive."""
    decisions = np.asarray(decisions)
    labels = np.asarray(labels)
    if len(decisions) != len(labels) or len(labels) == 0:
        raise MetricError("decisions and labels must be nonempty and aligned")
    tp = int(((decisions == 1) & (labels == 1)).sum())
    fp = int(((decisions == 1) & (labels == 0)).sum())
    fn = int(((decisions == 0) & (labels == 1)).sum())
    out = {}
    acc = float((decisions == labels).mean())
    out["accuracy"] = MetricValue.of("accuracy", acc, acc)

    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    out["precision"] = (
        MetricValue.of("precision", precision, precision)
        if precision is not None
        else MetricValue.undefined("precision")
    )
    out["recall"] = (
        MetricValue.of("recall", recall, recall)
        if recall is not None
        else MetricValue.undefined("recall")
    )
    if precision is None or recall is None:
        out["f1"] = MetricValue.undefined("f1")
    else:
        f1 = 0.0 if precision + recall == 0.0 else 2.0 * precision * recall / (precision + recall)
        out["f1"] = MetricValue.of("f1", f1, f1)
    return out


def _flip_column(ds: Dataset, column: str, atom) -> np.ndarray:
    col = ds.features[column]
    if atom.op == "=":
        values = sorted(set(col.tolist()))
        if len(values) != 2:
            raise MetricError(
                f"column {column!r} is not flippable: equality predicates need "
                f"exactly two observed values, saw {len(values)}"
            )
        a, b = values
        return np.where(col == a, b, a).astype(col.dtype)
    bound = float(atom.value)
    if atom.op == ">=":
        return np.where(col >= bound, bound - 1.0, bound)
    return np.where(col < bound, bound, bound - 1.0)


def causal_flip_rate(
    model,
    ds: Dataset,
    encoder: Encoder,
    threshold: float,
    attribute: str | None = None,
) -> MetricValue:
    """Fraction of rows whose thresholded decision changes when the protected
    predicate columns are counterfactually flipped and re-encoded.

    Binary-valued columns under an equality atom flip to the other value;
    threshold atoms like ``age>=25`` move the value to the other side of the
    bound (the canonical pair is the bound and one unit below it).
    """
    specs = ds.schema.protected
    if attribute is not None:
        specs = tuple(s for s in specs if s.name == attribute)
        if not specs:
            raise MetricError(f"unknown protected attribute {attribute!r}")

    flipped = dict(ds.features)
    seen = set()
    for spec in specs:
        for atom in spec.predicate:
            if atom.column in seen:
                raise MetricError(
                    f"column {atom.column!r} referenced by several predicate atoms "
                    "is not flippable"
                )
            seen.add(atom.column)
            if atom.column not in ds.features:
                raise MetricError(
                    f"protected column {atom.column!r} missing from the feature table"
                )
            flipped[atom.column] = _flip_column(ds, atom.column, atom)

    flipped_ds = replace(ds, features=flipped)
    base = decide(model.scores(encoder.transform(ds).values), threshold)
    counter = decide(model.scores(encoder.transform(flipped_ds).values), threshold)
    raw = float((base != counter).mean())
    return MetricValue.of("causal_flip", raw, canonical_score("causal_flip", raw))


def consistency(scores, encoded_features, k: int = 5) -> MetricValue:
    """Agreement of each score with its k nearest neighbors' mean score:
    1 - mean_i |s_i - mean(s_neighbors(i))|, ties broken by row index."""
    scores = np.asarray(scores, dtype=np.float64)
    x = np.asarray(encoded_features, dtype=np.float64)
    n = len(scores)
    if k < 1:
        raise MetricError(f"neighbor count must be >= 1, got {k}")
    if n <= k:
        raise MetricError(f"need more rows than neighbors, got n={n}, k={k}")
    neighbors = _kernels.knn_indices(x, k)
    neighbor_mean = scores[neighbors].mean(axis=1)
    raw = 1.0 - float(np.abs(scores - neighbor_mean).mean())
    return MetricValue.of("consistency", raw, canonical_score("consistency", raw))
