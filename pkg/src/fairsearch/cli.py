"""Command-line interface.

Subcommands: ``search`` (run a grid over a dataset), ``frontier`` (filter a
results CSV to its Pareto front), ``synth`` (generate the synthetic fixture
dataset), ``serve`` (serve a plot document and UI bundle).

Exit codes: 0 ok, 1 usage, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import (
    DatasetSchema,
    load_dataset,
    make_synthetic,
    write_dataset_csv,
    SYNTHETIC_UNFAVORABLE,
)
from .errors import (
    FairsearchError,
    FrontierError,
    LabelError,
    RowParseError,
    SchemaError,
    SearchSpaceError,
)
from .pareto import pareto_front
from .reporting import make_server, read_results_csv, write_plot_document, write_results_csv
from .search import SearchSpace, run_search

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

_DATA_ERRORS = (SchemaError, LabelError, RowParseError, SearchSpaceError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fairsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_search = sub.add_parser("search", help="evaluate a pipeline grid over a dataset")
    p_search.add_argument("--data", required=True, help="dataset CSV path")
    p_search.add_argument("--schema", required=True, help="dataset schema JSON path")
    p_search.add_argument("--space", required=True, help="search space JSON path")
    p_search.add_argument("--seed", type=int, default=None, help="override the space seed")
    p_search.add_argument("--parallel", type=int, default=1, help="worker count")
    p_search.add_argument("--out-csv", required=True, help="results CSV output path")
    p_search.add_argument("--out-plot", required=True, help="plot document output path")

    p_front = sub.add_parser("frontier", help="filter a results CSV to its Pareto front")
    p_front.add_argument("--csv", required=True, help="results CSV path")
    p_front.add_argument("--metrics", required=True, help="comma-separated metric ids (>= 2)")
    p_front.add_argument("--out", required=True, help="frontier CSV output path")

    p_synth = sub.add_parser("synth", help="generate the synthetic fixture dataset")
    p_synth.add_argument("--n", type=int, required=True)
    p_synth.add_argument("--bias", type=float, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="output prefix: writes <out>.csv and <out>.schema.json")

    p_serve = sub.add_parser("serve", help="serve a plot document and the explorer UI")
    p_serve.add_argument("--plot", required=True, help="plot document JSON path")
    p_serve.add_argument("--ui", default=None, help="UI bundle directory")
    p_serve.add_argument("--port", type=int, default=8080)
    return parser


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def _cmd_search(args) -> int:
    schema = DatasetSchema.from_json(_load_json(args.schema))
    space = SearchSpace.from_json(_load_json(args.space))
    if args.seed is not None:
        space = SearchSpace.from_json({**_load_json(args.space), "seed": args.seed})
    ds = load_dataset(args.data, schema)

    def progress(done, total):
        print(f"\revaluated {done}/{total}", end="", file=sys.stderr, flush=True)

    results = run_search(space, ds, parallelism=args.parallel, progress=progress)
    print(file=sys.stderr)
    write_results_csv(results, args.out_csv, space.metrics)
    write_plot_document(results, space.metrics, args.out_plot)
    failed = sum(1 for r in results if r.failed)
    print(f"{len(results)} configurations evaluated ({failed} failed)")
    print(f"results: {args.out_csv}")
    print(f"plot:    {args.out_plot}")
    return EXIT_OK


def _cmd_frontier(args) -> int:
    metric_ids = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if len(metric_ids) < 2:
        raise _UsageError("--metrics needs at least two comma-separated ids")
    results, available = read_results_csv(args.csv)
    for metric in metric_ids:
        if metric not in available:
            raise FairsearchError(f"metric {metric!r} not present in {args.csv}")
    front = pareto_front(results, metric_ids)
    keep = set(front.config_ids)

    # rewrite the original rows untouched so values stay byte-identical
    with open(args.csv, newline="", encoding="utf-8") as fh:
        lines = fh.read().splitlines(keepends=True)
    header, rows = lines[0], lines[1:]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        fh.write(header)
        for line in rows:
            config_id = int(line.split(",", 1)[0])
            if config_id in keep:
                fh.write(line)
    print(f"frontier: {len(front.config_ids)} of {len(results)} configurations -> {args.out}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    ds = make_synthetic(args.n, args.bias, args.seed)
    prefix = args.out[: -len(".csv")] if args.out.endswith(".csv") else args.out
    csv_path = Path(f"{prefix}.csv")
    schema_path = Path(f"{prefix}.schema.json")
    write_dataset_csv(ds, csv_path, unfavorable=SYNTHETIC_UNFAVORABLE)
    with open(schema_path, "w", encoding="utf-8") as fh:
        json.dump(ds.schema.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"dataset: {csv_path}")
    print(f"schema:  {schema_path}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    server = make_server(args.plot, args.ui, args.port)
    print(f"serving on http://127.0.0.1:{args.port} (ctrl-c to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "search":
            return _cmd_search(args)
        if args.command == "frontier":
            return _cmd_frontier(args)
        if args.command == "synth":
            return _cmd_synth(args)
        return _cmd_serve(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FairsearchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
