from __future__ import annotations

import json
import threading
import urllib.error
import urllib.request

import pytest

from fairsearch.data import make_synthetic
from fairsearch.pareto import pareto_front
from fairsearch.reporting import (
    build_plot_document,
    make_server,
    read_results_csv,
    write_plot_document,
    write_results_csv,
)
from fairsearch.search import SearchSpace, run_search

METRICS = ["accuracy", "f1", "disparate_impact", "statistical_parity"]


@pytest.fixture(scope="module")
def search_results():
    ds = make_synthetic(240, 0.5, seed=4)
    space = SearchSpace(
        families={
            "logistic": {"epochs": [40], "learning_rate": [0.05, 0.1]},
            "fair_logistic": {"epochs": [40], "fairness_weight": [0.0, 10.0]},
            "forest": {"n_trees": [3], "max_depth": [3]},
        },
        thresholds=[0.45, 0.55],
        preprocessors=["none"],
        postprocessors=["none"],
        exclude_protected=[False],
        metrics=METRICS,
        protected_attribute="grp",
        test_fraction=0.3,
        seed=4,
    )
    return space, run_search(space, ds)


def test_csv_row_count(search_results, tmp_path):
    space, results = search_results
    path = tmp_path / "results.csv"
    write_results_csv(results, path, space.metrics)
    lines = path.read_text().splitlines()
    assert len(lines) == len(results) + 1


def test_csv_round_trip_exact(search_results, tmp_path):
    space, results = search_results
    path = tmp_path / "results.csv"
    write_results_csv(results, path, space.metrics)
    loaded, metric_ids = read_results_csv(path)
    assert metric_ids == space.metrics
    assert len(loaded) == len(results)
    for original, parsed in zip(results, loaded):
        assert parsed.config.config_id == original.config.config_id
        assert parsed.config.family == original.config.family
        assert parsed.config.threshold == original.config.threshold
        for metric in space.metrics:
            a, b = original.metrics[metric], parsed.metrics[metric]
            assert a.defined == b.defined
            if a.defined:
                # 17 significant digits round-trips float64 exactly
                assert a.raw == b.raw
                assert a.score == b.score


def test_csv_failed_row_has_empty_metric_cells(tmp_path):
    ds = make_synthetic(150, 0.5, seed=1)
    space = SearchSpace(
        families={
            "fair_logistic": {
                "learning_rate": [0.5],
                "epochs": [5000],
                "fairness_weight": [100.0],
            }
        },
        thresholds=[0.5],
        preprocessors=["none"],
        postprocessors=["none"],
        exclude_protected=[False],
        metrics=["accuracy", "disparate_impact"],
        protected_attribute="grp",
        test_fraction=0.3,
        seed=1,
    )
    results = run_search(space, ds)
    assert results[0].failed
    path = tmp_path / "failed.csv"
    write_results_csv(results, path, space.metrics)
    loaded, _ = read_results_csv(path)
    assert loaded[0].failed
    assert "epoch" in loaded[0].error
    assert all(not v.defined for v in loaded[0].metrics.values())


def test_plot_document_pair_counts(search_results, tmp_path):
    space, results = search_results
    doc = build_plot_document(results, ["accuracy", "disparate_impact"])
    assert len(doc["frontiers"]) == 1
    doc4 = build_plot_document(results, space.metrics)
    assert len(doc4["frontiers"]) == 6


def test_plot_document_regeneration_byte_identical(search_results, tmp_path):
    space, results = search_results
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_plot_document(results, space.metrics, a)
    write_plot_document(results, space.metrics, b)
    assert a.read_bytes() == b.read_bytes()


def test_plot_and_csv_agree(search_results, tmp_path):
    space, results = search_results
    csv_path = tmp_path / "r.csv"
    write_results_csv(results, csv_path, space.metrics)
    loaded, _ = read_results_csv(csv_path)
    doc = build_plot_document(results, space.metrics)
    by_id = {p["config_id"]: p for p in doc["points"]}
    for row in loaded:
        point = by_id[row.config.config_id]
        for metric in space.metrics:
            cell = row.metrics[metric]
            entry = point["metrics"][metric]
            if cell.defined:
                assert entry["raw"] == cell.raw
                assert entry["score"] == cell.score
            else:
                assert entry["raw"] is None


def test_plot_frontiers_match_recomputation(search_results):
    space, results = search_results
    doc = build_plot_document(results, space.metrics)
    for entry in doc["frontiers"]:
        recomputed = pareto_front(results, tuple(entry["metrics"])).config_ids
        assert tuple(entry["config_ids"]) == recomputed
        failed = {p["config_id"] for p in doc["points"] if p["failed"]}
        assert not failed & set(entry["config_ids"])


def test_plot_document_structure(search_results):
    space, results = search_results
    doc = build_plot_document(results, space.metrics)
    assert doc["format_version"] == 1
    assert [m["id"] for m in doc["metrics"]] == space.metrics
    families = {f["id"]: f["color"] for f in doc["families"]}
    assert set(families) == {"logistic", "fair_logistic", "forest"}
    assert all(c.startswith("#") for c in families.values())
    point = doc["points"][0]
    for key in (
        "config_id",
        "family",
        "hyperparams",
        "threshold",
        "preprocessor",
        "postprocessor",
        "exclude_protected",
        "failed",
        "metrics",
    ):
        assert key in point
    assert all(isinstance(v, str) for v in point["hyperparams"].values())


@pytest.fixture
def served(search_results, tmp_path):
    space, results = search_results
    plot_path = tmp_path / "plot.json"
    write_plot_document(results, space.metrics, plot_path)
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<!doctype html><title>explorer</title>")
    (ui_dir / "app.js").write_text("console.log('hi')")
    server = make_server(plot_path, ui_dir, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}", plot_path
    server.shutdown()
    server.server_close()


def _get(url):
    with urllib.request.urlopen(url, timeout=5) as resp:
        return resp.status, resp.headers.get("Content-Type"), resp.read()


def test_serve_plot_endpoint(served):
    base, plot_path = served
    status, ctype, body = _get(f"{base}/api/plot")
    assert status == 200
    assert ctype == "application/json"
    assert body == plot_path.read_bytes()
    json.loads(body)


def test_serve_static_ui(served):
    base, _ = served
    status, ctype, body = _get(f"{base}/")
    assert status == 200 and b"explorer" in body
    status, ctype, _ = _get(f"{base}/app.js")
    assert status == 200


def test_serve_missing_is_404(served):
    base, _ = served
    with pytest.raises(urllib.error.HTTPError) as err:
        _get(f"{base}/missing.js")
    assert err.value.code == 404


def test_serve_rejects_traversal(served):
    base, _ = served
    with pytest.raises(urllib.error.HTTPError) as err:
        _get(f"{base}/../plot.json")
    assert err.value.code == 404


def test_serve_no_mutation(served):
    base, _ = served
    req = urllib.request.Request(f"{base}/api/plot", data=b"x", method="POST")
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(req, timeout=5)
    assert err.value.code == 405


def test_serve_concurrent_reads_identical(served):
    base, _ = served
    bodies = []
    errors = []

    def fetch():
        try:
            bodies.append(_get(f"{base}/api/plot")[2])
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=fetch) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len({bytes(b) for b in bodies}) == 1
