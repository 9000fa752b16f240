"""Results persistence and serving: the results CSV, the plot document
consumed by the explorer UI, and a read-only local HTTP endpoint.

Both artifacts use canonical serialization (fixed column order, sorted JSON
keys, 17-significant-digit decimals) so identical searches export byte-
identical files.
"""

from __future__ import annotations

import csv
import http.server
import itertools
import json
import mimetypes
import posixpath
from pathlib import Path

from .errors import FairsearchError, FrontierError
from .metrics import METRIC_INFO, MetricValue
from .pareto import pareto_front
from .search import EvaluatedModel, PipelineConfig

PLOT_FORMAT_VERSION = 1

# stable per-family color keys so exports are comparable across sessions
FAMILY_COLORS = {
    "logistic": "#7b3294",
    "fair_logistic": "#d01c8b",
    "forest": "#e66101",
}

_FIXED_COLUMNS = (
    "config_id",
    "family",
    "hyperparams",
    "preprocessor",
    "postprocessor",
    "threshold",
    "exclude_protected",
    "failed",
    "error",
)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _hyperparam_str(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def _hyperparams_field(hp: dict) -> str:
    return ";".join(f"{k}={_hyperparam_str(hp[k])}" for k in sorted(hp))


def results_header(metric_ids) -> list[str]:
    header = list(_FIXED_COLUMNS)
    for metric in metric_ids:
        header.append(f"{metric}_raw")
        header.append(f"{metric}_score")
    return header


def write_results_csv(results: list[EvaluatedModel], path, metric_ids=None) -> None:
    """RFC-4180 results table, one row per config, ordered by config_id;
    undefined metric cells are left empty."""
    if not results:
        raise FairsearchError("no results to write")
    if metric_ids is None:
        metric_ids = list(results[0].metrics.keys())
    rows = sorted(results, key=lambda r: r.config.config_id)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(results_header(metric_ids))
            for res in rows:
                cfg = res.config
                record = [
                    str(cfg.config_id),
                    cfg.family,
                    _hyperparams_field(cfg.hyperparameters),
                    cfg.preprocessor,
                    cfg.postprocessor,
                    _fmt(cfg.threshold),
                    "true" if cfg.exclude_protected else "false",
                    "true" if res.failed else "false",
                    res.error,
                ]
                for metric in metric_ids:
                    value = res.metrics.get(metric)
                    if value is not None and value.defined:
                        record.append(_fmt(value.raw))
                        record.append(_fmt(value.score))
                    else:
                        record.append("")
                        record.append("")
                writer.writerow(record)
    except OSError as exc:
        raise FairsearchError(f"cannot write results CSV {path}: {exc}") from exc


def read_results_csv(path) -> tuple[list[EvaluatedModel], list[str]]:
    """Parse a results CSV back into evaluated models (hyperparameters stay
    strings) plus the metric id list recovered from the header."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
    except (OSError, StopIteration) as exc:
        raise FairsearchError(f"cannot read results CSV {path}: {exc}") from exc
    if list(header[: len(_FIXED_COLUMNS)]) != list(_FIXED_COLUMNS):
        raise FairsearchError(f"{path}: unexpected results CSV header")
    metric_ids = [h[: -len("_raw")] for h in header[len(_FIXED_COLUMNS) :: 2]]

    results = []
    for row in rows:
        fixed = dict(zip(_FIXED_COLUMNS, row))
        hp = {}
        if fixed["hyperparams"]:
            for item in fixed["hyperparams"].split(";"):
                key, value = item.split("=", 1)
                hp[key] = value
        cfg = PipelineConfig(
            config_id=int(fixed["config_id"]),
            family=fixed["family"],
            hyperparameters=hp,
            threshold=float(fixed["threshold"]),
            preprocessor=fixed["preprocessor"],
            postprocessor=fixed["postprocessor"],
            exclude_protected=fixed["exclude_protected"] == "true",
        )
        metric_cells = row[len(_FIXED_COLUMNS) :]
        metrics = {}
        for i, metric in enumerate(metric_ids):
            raw, score = metric_cells[2 * i], metric_cells[2 * i + 1]
            if raw == "":
                metrics[metric] = MetricValue.undefined(metric)
            else:
                metrics[metric] = MetricValue.of(metric, float(raw), float(score))
        results.append(
            EvaluatedModel(
                config=cfg,
                metrics=metrics,
                train_seconds=0.0,
                failed=fixed["failed"] == "true",
                error=fixed["error"],
            )
        )
    return results, metric_ids


def build_plot_document(results: list[EvaluatedModel], metric_ids) -> dict:
    """Assemble the explorer document: metric catalog, family colors, one
    point per config, and the frontier for every unordered metric pair."""
    metric_ids = list(metric_ids)
    points = []
    for res in sorted(results, key=lambda r: r.config.config_id):
        cfg = res.config
        metrics = {}
        for metric in metric_ids:
            value = res.metrics.get(metric)
            if value is not None and value.defined:
                metrics[metric] = {"raw": value.raw, "score": value.score, "defined": True}
            else:
                metrics[metric] = {"raw": None, "score": None, "defined": False}
        points.append(
            {
                "config_id": cfg.config_id,
                "family": cfg.family,
                "hyperparams": {k: _hyperparam_str(v) for k, v in cfg.hyperparameters.items()},
                "threshold": cfg.threshold,
                "preprocessor": cfg.preprocessor,
                "postprocessor": cfg.postprocessor,
                "exclude_protected": cfg.exclude_protected,
                "failed": res.failed,
                "error": res.error,
                "metrics": metrics,
            }
        )

    frontiers = []
    for a, b in itertools.combinations(sorted(metric_ids), 2):
        try:
            front = pareto_front(results, (a, b)).config_ids
        except FrontierError:
            front = ()
        frontiers.append({"metrics": [a, b], "config_ids": list(front)})

    families = sorted({res.config.family for res in results})
    return {
        "format_version": PLOT_FORMAT_VERSION,
        "metrics": [
            {
                "id": metric,
                "display_name": METRIC_INFO[metric][0],
                "orientation": METRIC_INFO[metric][1],
            }
            for metric in metric_ids
        ],
        "families": [
            {"id": family, "color": FAMILY_COLORS.get(family, "#666666")}
            for family in families
        ],
        "points": points,
        "frontiers": frontiers,
    }


def write_plot_document(results: list[EvaluatedModel], metric_ids, path) -> None:
    doc = build_plot_document(results, metric_ids)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise FairsearchError(f"cannot write plot document {path}: {exc}") from exc


class _ExplorerHandler(http.server.BaseHTTPRequestHandler):
    plot_bytes: bytes = b""
    ui_dir: Path | None = None

    def log_message(self, *args):  # silence request logging in tests/CLI
        pass

    def _send(self, status, content_type, body):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/api/plot":
            self._send(200, "application/json", self.plot_bytes)
            return
        if self.ui_dir is not None:
            rel = posixpath.normpath(path.lstrip("/")) or "index.html"
            if rel in (".", ""):
                rel = "index.html"
            target = (self.ui_dir / rel).resolve()
            if target.is_dir():
                target = target / "index.html"
            inside = self.ui_dir.resolve() in target.parents or target == self.ui_dir.resolve()
            if inside and target.is_file():
                ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                self._send(200, ctype, target.read_bytes())
                return
        self._send(404, "text/plain", b"not found")

    def do_POST(self):
        self._send(405, "text/plain", b"read-only service")

    do_PUT = do_DELETE = do_PATCH = do_POST


def make_server(plot_path, ui_dir=None, port: int = 8080):
    """Read-only explorer server: GET /api/plot plus static UI assets.

    Raises on missing inputs or a busy port; call ``serve_forever()`` on the
    result (or ``shutdown()`` from another thread).
    """
    plot = Path(plot_path)
    if not plot.is_file():
        raise FairsearchError(f"plot document not found: {plot}")
    if ui_dir is not None:
        ui_dir = Path(ui_dir)
        if not ui_dir.is_dir():
            raise FairsearchError(f"UI bundle directory not found: {ui_dir}")

    handler = type(
        "Handler",
        (_ExplorerHandler,),
        {"plot_bytes": plot.read_bytes(), "ui_dir": ui_dir},
    )
    return http.server.ThreadingHTTPServer(("127.0.0.1", port), handler)
