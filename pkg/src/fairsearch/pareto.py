"""Pareto dominance and frontier computation over canonical metric scores.

Dominance always works on canonical [0, 1] scores, never raw values, so
"higher is better" holds uniformly across metrics. The shipped filter is the
O(n²) pairwise check, which is not a bottleneck at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import FrontierError
from .search import EvaluatedModel


@dataclass(frozen=True)
class FrontierResult:
    """Frontier membership plus the candidates excluded because a requested
    metric was undefined (or the config failed)."""

    config_ids: tuple[int, ...]
    excluded: tuple[int, ...]


def dominates(a: EvaluatedModel, b: EvaluatedModel, metric_ids) -> bool:
    """True iff a is >= b on every canonical score and > on at least one."""
    better = False
    for metric in metric_ids:
        va, vb = a.metrics[metric], b.metrics[metric]
        if not (va.defined and vb.defined):
            raise FrontierError(f"metric {metric!r} undefined on a candidate")
        if va.score < vb.score:
            return False
        if va.score > vb.score:
            better = True
    return better


def pareto_front(candidates: list[EvaluatedModel], metric_ids) -> FrontierResult:
    """Exactly the candidates dominated by no other, sorted by config_id.

    Duplicates in canonical space are all retained. Failed candidates and
    candidates with any requested metric undefined are excluded and reported.
    """
    metric_ids = list(metric_ids)
    if len(metric_ids) < 2:
        raise FrontierError("a frontier needs at least two metrics")
    considered = []
    excluded = []
    for cand in candidates:
        defined = all(
            m in cand.metrics and cand.metrics[m].defined for m in metric_ids
        )
        if cand.failed or not defined:
            excluded.append(cand.config.config_id)
        else:
            considered.append(cand)
    if not considered:
        raise FrontierError("no candidate has all requested metrics defined")

    scores = np.array(
        [[c.metrics[m].score for m in metric_ids] for c in considered], dtype=np.float64
    )
    mask = _kernels.pareto_nondominated(scores)
    front = sorted(c.config.config_id for c, keep in zip(considered, mask) if keep)
    return FrontierResult(config_ids=tuple(front), excluded=tuple(sorted(excluded)))
