"""Pipeline grid enumeration and evaluation.

A search space is a JSON document naming model families with hyperparameter
option lists, thresholds, pre/postprocessors, protected-column exclusion
options, and the metrics to report. Every configuration is evaluated on one
shared train/test split; per-config seeds spawn from the master seed and the
config id, so results never depend on execution order or worker count.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, Encoder, exclude_protected, split
from .errors import (
    DivergenceError,
    HyperparameterError,
    MetricError,
    MitigationError,
    SearchSpaceError,
)
from .learners import (
    FAIR_LOGISTIC,
    FAMILIES,
    FOREST,
    LOGISTIC,
    decide,
    resolve_hyperparameters,
    train_fair_logistic,
    train_forest,
    train_logistic,
)
from .metrics import (
    CONFUSION_METRICS,
    METRIC_IDS,
    MetricValue,
    causal_flip_rate,
    consistency,
    fairness_metric,
    group_confusion,
    quality_metrics,
)
from .mitigation import (
    THRESHOLD_TARGETS,
    apply_group_thresholds,
    fit_group_thresholds,
    reweigh,
)

PREPROCESSORS = ("none", "reweigh")
POSTPROCESSORS = ("none",) + tuple(f"group_threshold:{t}" for t in THRESHOLD_TARGETS)


@dataclass(frozen=True)
class SearchSpace:
    families: dict[str, dict[str, list]]
    thresholds: list[float]
    preprocessors: list[str]
    postprocessors: list[str]
    exclude_protected: list[bool]
    metrics: list[str]
    protected_attribute: str
    test_fraction: float
    seed: int
    consistency_k: int = 5

    def __post_init__(self):
        if not self.families:
            raise SearchSpaceError("at least one model family is required")
        for family, grid in self.families.items():
            if family not in FAMILIES:
                raise SearchSpaceError(f"unknown model family {family!r}")
            for key, options in grid.items():
                if not isinstance(options, list) or not options:
                    raise SearchSpaceError(
                        f"{family}.{key}: hyperparameter options must be a nonempty list"
                    )
                for value in options:
                    try:
                        resolve_hyperparameters(family, {key: value})
                    except HyperparameterError as exc:
                        raise SearchSpaceError(str(exc)) from None
        for name, values in (
            ("thresholds", self.thresholds),
            ("preprocessors", self.preprocessors),
            ("postprocessors", self.postprocessors),
            ("exclude_protected", self.exclude_protected),
            ("metrics", self.metrics),
        ):
            if not values:
                raise SearchSpaceError(f"{name} must be nonempty")
        for t in self.thresholds:
            if not 0.0 <= t <= 1.0:
                raise SearchSpaceError(f"threshold {t} outside [0, 1]")
        for p in self.preprocessors:
            if p not in PREPROCESSORS:
                raise SearchSpaceError(f"unknown preprocessor {p!r}")
        for p in self.postprocessors:
            if p not in POSTPROCESSORS:
                raise SearchSpaceError(f"unknown postprocessor {p!r}")
        for m in self.metrics:
            if m not in METRIC_IDS:
                raise SearchSpaceError(f"unknown metric id {m!r}")
        if len(set(self.metrics)) != len(self.metrics):
            raise SearchSpaceError("duplicate metric ids")
        if not 0.0 < self.test_fraction < 1.0:
            raise SearchSpaceError("test_fraction must be in (0, 1)")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise SearchSpaceError("seed must be a nonnegative integer")
        if self.consistency_k < 1:
            raise SearchSpaceError("consistency_k must be >= 1")

    @classmethod
    def from_json(cls, doc: dict) -> "SearchSpace":
        try:
            return cls(
                families=doc["families"],
                thresholds=doc["thresholds"],
                preprocessors=doc.get("preprocessors", ["none"]),
                postprocessors=doc.get("postprocessors", ["none"]),
                exclude_protected=doc.get("exclude_protected", [False]),
                metrics=doc["metrics"],
                protected_attribute=doc["protected_attribute"],
                test_fraction=doc.get("test_fraction", 0.3),
                seed=doc.get("seed", 0),
                consistency_k=doc.get("consistency_k", 5),
            )
        except KeyError as exc:
            raise SearchSpaceError(f"search space missing key {exc}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "SearchSpace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class PipelineConfig:
    """One grid point; ``config_id`` is its rank in enumeration order."""

    config_id: int
    family: str
    hyperparameters: dict
    threshold: float
    preprocessor: str
    postprocessor: str
    exclude_protected: bool


@dataclass(frozen=True)
class EvaluatedModel:
    config: PipelineConfig
    metrics: dict[str, MetricValue]
    train_seconds: float
    failed: bool = False
    error: str = ""


def enumerate_configs(space: SearchSpace) -> list[PipelineConfig]:
    """Cartesian product in fixed order: families, then hyperparameter options
    in declared order, then exclusion, preprocessor, postprocessor, threshold."""
    configs = []
    for family, grid in space.families.items():
        keys = list(grid.keys())
        for combo in itertools.product(*(grid[k] for k in keys)):
            hp = resolve_hyperparameters(family, dict(zip(keys, combo)))
            for excl in space.exclude_protected:
                for pre in space.preprocessors:
                    for post in space.postprocessors:
                        for threshold in space.thresholds:
                            configs.append(
                                PipelineConfig(
                                    config_id=len(configs),
                                    family=family,
                                    hyperparameters=hp,
                                    threshold=threshold,
                                    preprocessor=pre,
                                    postprocessor=post,
                                    exclude_protected=excl,
                                )
                            )
    return configs


def config_seed(master_seed: int, config_id: int) -> int:
    """Splittable per-config seed: adding configs never perturbs existing ones."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(config_id,))
    return int(ss.generate_state(1, np.uint64)[0])


def _train(cfg: PipelineConfig, x, labels, weights, groups, seed):
    if cfg.family == LOGISTIC:
        return train_logistic(x, labels, weights, cfg.hyperparameters, seed)
    if cfg.family == FAIR_LOGISTIC:
        return train_fair_logistic(x, labels, weights, groups, cfg.hyperparameters, seed)
    if cfg.family == FOREST:
        return train_forest(x, labels, weights, cfg.hyperparameters, seed)
    raise SearchSpaceError(f"unknown model family {cfg.family!r}")


def _undefined_metrics(space: SearchSpace) -> dict[str, MetricValue]:
    return {m: MetricValue.undefined(m) for m in space.metrics}


def evaluate_config(
    cfg: PipelineConfig, train: Dataset, test: Dataset, space: SearchSpace
) -> EvaluatedModel:
    """Run one pipeline: exclude, encode (fit on train), reweigh, train,
    score, threshold/postprocess, then compute every requested metric on the
    held-out split. Learner divergence and mitigation errors mark the config
    failed instead of aborting the search."""
    started = time.perf_counter()
    seed = config_seed(space.seed, cfg.config_id)
    attr = space.protected_attribute
    groups_train = train.group(attr)
    groups_test = test.group(attr)
    try:
        work_train = exclude_protected(train) if cfg.exclude_protected else train
        work_test = exclude_protected(test) if cfg.exclude_protected else test
        encoder = Encoder().fit(work_train)
        x_train = encoder.transform(work_train).values
        x_test = encoder.transform(work_test).values

        if cfg.preprocessor == "reweigh":
            weights = reweigh(train.labels, groups_train)
        else:
            weights = train.weights

        model = _train(cfg, x_train, train.labels, weights, groups_train, seed)
        scores_test = model.scores(x_test)

        if cfg.postprocessor == "none":
            decisions = decide(scores_test, cfg.threshold)
        else:
            target = cfg.postprocessor.split(":", 1)[1]
            scores_train = model.scores(x_train)
            t_priv, t_unpriv = fit_group_thresholds(
                scores_train, groups_train, cfg.threshold, target, train.labels
            )
            decisions = apply_group_thresholds(scores_test, groups_test, t_priv, t_unpriv)
    except (DivergenceError, MitigationError) as exc:
        return EvaluatedModel(
            config=cfg,
            metrics=_undefined_metrics(space),
            train_seconds=time.perf_counter() - started,
            failed=True,
            error=str(exc),
        )

    results: dict[str, MetricValue] = {}
    quality = quality_metrics(decisions, test.labels)
    try:
        gc = group_confusion(decisions, test.labels, groups_test)
    except MetricError:
        gc = None
    for metric in space.metrics:
        try:
            if metric in quality:
                results[metric] = quality[metric]
            elif metric in CONFUSION_METRICS:
                results[metric] = (
                    fairness_metric(metric, gc) if gc is not None else MetricValue.undefined(metric)
                )
            elif metric == "causal_flip":
                results[metric] = causal_flip_rate(model, test, encoder, cfg.threshold, attr)
            elif metric == "consistency":
                results[metric] = consistency(scores_test, x_test, space.consistency_k)
            else:
                raise MetricError(f"unknown metric id {metric!r}")
        except MetricError:
            results[metric] = MetricValue.undefined(metric)
    return EvaluatedModel(
        config=cfg,
        metrics=results,
        train_seconds=time.perf_counter() - started,
    )


_WORKER_STATE: dict = {}


def _worker_init(space: SearchSpace, train: Dataset, test: Dataset) -> None:
    _WORKER_STATE["space"] = space
    _WORKER_STATE["train"] = train
    _WORKER_STATE["test"] = test
    _WORKER_STATE["configs"] = enumerate_configs(space)


def _worker_eval(config_id: int) -> EvaluatedModel:
    return evaluate_config(
        _WORKER_STATE["configs"][config_id],
        _WORKER_STATE["train"],
        _WORKER_STATE["test"],
        _WORKER_STATE["space"],
    )


def run_search(
    space: SearchSpace,
    ds: Dataset,
    parallelism: int = 1,
    progress=None,
) -> list[EvaluatedModel]:
    """Evaluate every configuration; output is ordered by config_id regardless
    of worker count. ``progress(done, total)`` is called as results land."""
    configs = enumerate_configs(space)
    train, test = split(ds, space.test_fraction, space.seed)
    total = len(configs)
    done = 0
    if parallelism <= 1:
        results = []
        for cfg in configs:
            results.append(evaluate_config(cfg, train, test, space))
            done += 1
            if progress is not None:
                progress(done, total)
        return results

    results_by_id: dict[int, EvaluatedModel] = {}
    with ProcessPoolExecutor(
        max_workers=parallelism,
        initializer=_worker_init,
        initargs=(space, train, test),
    ) as pool:
        pending = {pool.submit(_worker_eval, cfg.config_id) for cfg in configs}
        while pending:
            finished, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in finished:
                result = fut.result()
                results_by_id[result.config.config_id] = result
                done += 1
                if progress is not None:
                    progress(done, total)
    return [results_by_id[i] for i in range(total)]
