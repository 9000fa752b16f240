from __future__ import annotations

import numpy as np
import pytest

from fairsearch.data import Encoder, make_synthetic, split
from fairsearch.errors import SearchSpaceError
from fairsearch.learners import decide, train_logistic
from fairsearch.metrics import fairness_metric, group_confusion
from fairsearch.mitigation import group_threshold
from fairsearch.pareto import pareto_front
from fairsearch.search import (
    SearchSpace,
    config_seed,
    enumerate_configs,
    evaluate_config,
    run_search,
)


def space_of(families, **overrides):
    base = dict(
        families=families,
        thresholds=[0.5],
        preprocessors=["none"],
        postprocessors=["none"],
        exclude_protected=[False],
        metrics=["accuracy", "disparate_impact"],
        protected_attribute="grp",
        test_fraction=0.3,
        seed=5,
    )
    base.update(overrides)
    return SearchSpace(**base)


def test_enumerate_single_config():
    space = space_of({"logistic": {}})
    assert len(enumerate_configs(space)) == 1


def test_enumerate_grid_product():
    space = space_of(
        {"logistic": {"learning_rate": [0.05, 0.1], "epochs": [10, 20, 30]}},
        thresholds=[0.5, 0.7],
    )
    configs = enumerate_configs(space)
    assert len(configs) == 12
    assert [c.config_id for c in configs] == list(range(12))


def test_enumerate_two_families_with_processors():
    space = space_of(
        {
            "logistic": {"learning_rate": [0.05, 0.1], "epochs": [10, 20, 30]},
            "forest": {},
        },
        thresholds=[0.5, 0.7],
        preprocessors=["none", "reweigh"],
    )
    assert len(enumerate_configs(space)) == (6 + 1) * 2 * 2


def test_enumerate_order_is_stable():
    space = space_of(
        {"logistic": {"epochs": [10, 20]}},
        thresholds=[0.3, 0.7],
        preprocessors=["none", "reweigh"],
    )
    configs = enumerate_configs(space)
    again = enumerate_configs(space)
    assert [(c.config_id, c.hyperparameters["epochs"], c.preprocessor, c.threshold) for c in configs] == [
        (c.config_id, c.hyperparameters["epochs"], c.preprocessor, c.threshold) for c in again
    ]
    # threshold varies fastest, then postprocessor, preprocessor, exclusion
    assert [c.threshold for c in configs[:2]] == [0.3, 0.7]
    assert configs[0].preprocessor == "none" and configs[2].preprocessor == "reweigh"
    assert configs[0].hyperparameters["epochs"] == 10
    assert configs[4].hyperparameters["epochs"] == 20


def test_space_validation_errors():
    with pytest.raises(SearchSpaceError):
        space_of({})
    with pytest.raises(SearchSpaceError):
        space_of({"nonsense": {}})
    with pytest.raises(SearchSpaceError):
        space_of({"logistic": {"epochs": []}})
    with pytest.raises(SearchSpaceError):
        space_of({"logistic": {"bogus": [1]}})
    with pytest.raises(SearchSpaceError):
        space_of({"logistic": {}}, thresholds=[1.5])
    with pytest.raises(SearchSpaceError):
        space_of({"logistic": {}}, metrics=["accuracy", "nope"])
    with pytest.raises(SearchSpaceError):
        space_of({"logistic": {}}, preprocessors=["smote"])
    with pytest.raises(SearchSpaceError):
        space_of({"logistic": {}}, test_fraction=0.0)


def test_config_seed_is_stable_and_distinct():
    assert config_seed(5, 0) == config_seed(5, 0)
    seeds = {config_seed(5, i) for i in range(50)}
    assert len(seeds) == 50
    assert config_seed(6, 0) != config_seed(5, 0)


def test_evaluate_config_deterministic():
    ds = make_synthetic(300, 0.4, seed=2)
    space = space_of(
        {"forest": {"n_trees": [3], "max_depth": [3]}},
        metrics=["accuracy", "disparate_impact", "consistency"],
    )
    cfg = enumerate_configs(space)[0]
    train, test = split(ds, space.test_fraction, space.seed)
    a = evaluate_config(cfg, train, test, space)
    b = evaluate_config(cfg, train, test, space)
    assert {m: (v.raw, v.score) for m, v in a.metrics.items()} == {
        m: (v.raw, v.score) for m, v in b.metrics.items()
    }


def test_evaluate_config_excluded_has_zero_causal_flip():
    ds = make_synthetic(300, 0.4, seed=2)
    space = space_of(
        {"logistic": {"epochs": [50]}},
        exclude_protected=[True],
        metrics=["accuracy", "causal_flip"],
    )
    cfg = enumerate_configs(space)[0]
    train, test = split(ds, space.test_fraction, space.seed)
    result = evaluate_config(cfg, train, test, space)
    assert result.metrics["causal_flip"].raw == 0.0


def test_evaluate_config_failure_is_recorded_not_raised():
    ds = make_synthetic(200, 0.5, seed=1)
    space = space_of(
        {
            "fair_logistic": {
                "learning_rate": [0.5],
                "epochs": [5000],
                "fairness_weight": [100.0],
            }
        }
    )
    cfg = enumerate_configs(space)[0]
    train, test = split(ds, space.test_fraction, space.seed)
    result = evaluate_config(cfg, train, test, space)
    assert result.failed
    assert "epoch" in result.error
    assert all(not v.defined for v in result.metrics.values())


def test_failed_configs_never_reach_the_frontier():
    ds = make_synthetic(200, 0.5, seed=1)
    space = space_of(
        {
            "logistic": {"epochs": [50]},
            "fair_logistic": {
                "learning_rate": [0.5],
                "epochs": [5000],
                "fairness_weight": [100.0],
            },
        }
    )
    results = run_search(space, ds)
    assert any(r.failed for r in results)
    front = pareto_front(results, ("accuracy", "disparate_impact"))
    failed_ids = {r.config.config_id for r in results if r.failed}
    assert not failed_ids & set(front.config_ids)
    assert failed_ids <= set(front.excluded)


def test_run_search_row_per_config_in_order():
    ds = make_synthetic(150, 0.3, seed=9)
    space = space_of(
        {"logistic": {"epochs": [20, 40]}},
        thresholds=[0.4, 0.6],
        metrics=["accuracy", "statistical_parity"],
    )
    results = run_search(space, ds)
    assert [r.config.config_id for r in results] == list(range(4))
    for r in results:
        assert set(r.metrics) == set(space.metrics)


def test_run_search_progress_events():
    ds = make_synthetic(100, 0.3, seed=9)
    space = space_of({"logistic": {"epochs": [10, 20]}})
    events = []
    run_search(space, ds, progress=lambda done, total: events.append((done, total)))
    assert events == [(1, 2), (2, 2)]


def test_run_search_parallel_matches_serial():
    ds = make_synthetic(240, 0.4, seed=3)
    space = space_of(
        {
            "logistic": {"epochs": [30], "learning_rate": [0.05, 0.1]},
            "forest": {"n_trees": [3], "max_depth": [3]},
        },
        thresholds=[0.4, 0.6],
        preprocessors=["none", "reweigh"],
        metrics=["accuracy", "disparate_impact", "average_odds"],
    )
    serial = run_search(space, ds, parallelism=1)
    parallel = run_search(space, ds, parallelism=4)
    assert len(serial) == len(parallel) == len(enumerate_configs(space))
    for a, b in zip(serial, parallel):
        assert a.config == b.config
        assert a.failed == b.failed
        for metric in space.metrics:
            assert a.metrics[metric] == b.metrics[metric]


def test_postprocessor_never_worsens_training_gap():
    # exact on the split the thresholds were fitted to
    ds = make_synthetic(400, 0.5, seed=6)
    train, test = split(ds, 0.3, seed=6)
    enc = Encoder().fit(train)
    xtr = enc.transform(train).values
    model = train_logistic(xtr, train.labels, train.weights, {"epochs": 150})
    scores = model.scores(xtr)
    groups = train.group("grp")

    base_decisions = decide(scores, 0.5)
    post_decisions = group_threshold(scores, groups, 0.5)
    gc_base = group_confusion(base_decisions, train.labels, groups)
    gc_post = group_confusion(post_decisions, train.labels, groups)
    spd_base = abs(fairness_metric("statistical_parity", gc_base).raw)
    spd_post = abs(fairness_metric("statistical_parity", gc_post).raw)
    assert spd_post <= spd_base
    # privileged decisions untouched
    assert np.array_equal(base_decisions[groups], post_decisions[groups])


def test_postprocessed_config_runs_end_to_end():
    ds = make_synthetic(300, 0.5, seed=8)
    space = space_of(
        {"logistic": {"epochs": [80]}},
        postprocessors=["none", "group_threshold:selection_rate"],
        metrics=["accuracy", "statistical_parity"],
    )
    results = run_search(space, ds)
    assert len(results) == 2
    assert not any(r.failed for r in results)
