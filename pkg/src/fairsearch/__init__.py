"""Fairness-aware model search.

Trains classification pipelines over a configuration grid, scores each on
quality and fairness metrics, computes Pareto-optimal trade-off sets, and
exports results for an interactive explorer.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .data import (
    Dataset,
    DatasetSchema,
    EncodedMatrix,
    Encoder,
    encode,
    exclude_protected,
    load_dataset,
    make_synthetic,
    split,
)
from .learners import decide, train_fair_logistic, train_forest, train_logistic
from .metrics import (
    METRIC_IDS,
    GroupConfusion,
    MetricValue,
    canonical_score,
    causal_flip_rate,
    consistency,
    fairness_metric,
    group_confusion,
    quality_metrics,
)
from .mitigation import group_threshold, reweigh
from .pareto import FrontierResult, dominates, pareto_front
from .reporting import (
    build_plot_document,
    make_server,
    read_results_csv,
    write_plot_document,
    write_results_csv,
)
from .search import (
    EvaluatedModel,
    PipelineConfig,
    SearchSpace,
    enumerate_configs,
    evaluate_config,
    run_search,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "Dataset",
    "DatasetSchema",
    "EncodedMatrix",
    "Encoder",
    "encode",
    "exclude_protected",
    "load_dataset",
    "make_synthetic",
    "split",
    "decide",
    "train_fair_logistic",
    "train_forest",
    "train_logistic",
    "METRIC_IDS",
    "GroupConfusion",
    "MetricValue",
    "canonical_score",
    "causal_flip_rate",
    "consistency",
    "fairness_metric",
    "group_confusion",
    "quality_metrics",
    "group_threshold",
    "reweigh",
    "FrontierResult",
    "dominates",
    "pareto_front",
    "build_plot_document",
    "make_server",
    "read_results_csv",
    "write_plot_document",
    "write_results_csv",
    "EvaluatedModel",
    "PipelineConfig",
    "SearchSpace",
    "enumerate_configs",
    "evaluate_config",
    "run_search",
    "__version__",
]
