"""Command-line front end.

Every subcommand reads an edge list from ``--input`` (or standard input),
writes its primary table to ``--output`` (or standard output) and emits a run
manifest as one JSON line on standard error. When ``--output`` names a file the
manifest is also written next to it as ``<output>.manifest.json``. The
manifest's duration field is the only part of a run that varies between
reruns, so it never goes into a primary output.

Errors are reported on standard error as ``{"error": kind, "message": ...}``
with these exit codes:

====  =========================================
0     success
2     usage error (bad flags or arguments)
3     I/O error (missing or unreadable files)
4     input parse error
5     computation error (degenerate graph, failed fit)
6     dataset registry or digest error
====  =========================================
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import datasets as ds
from .coreness import compute_metrics
from .crawler import VARIANTS, CrawlConfig, crawl, crawl_all, summarize, top_nodes_connected
from .evaluation import UndefinedCorrelationError, ranking_report
from .graph import EdgeListParseError, GraphError, largest_connected_component, load_edge_list
from .rank import (
    FitError,
    LogisticParams,
    RankCurve,
    evaluate_fit,
    fit_best,
    heuristic_params,
    logistic_eval,
    rank_curve,
)
from .spreading import DegenerateGraphError, SirConfig, default_lambda, spreading_power_all

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PARSE, EXIT_COMPUTE, EXIT_DATASET = 0, 2, 3, 4, 5, 6


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "usage", f"{self.prog}: {message}")


@dataclass
class RunManifest:
    subcommand: str
    inputs: dict
    flags: dict
    seed: int | None
    version: str = __version__
    duration_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)


class _Run:
    """Per-invocation state: resolved streams and the manifest being built."""

    def __init__(self, args, stdin, stdout):
        self.args = args
        self.stdin = stdin
        self.stdout = stdout
        flags = {k: v for k, v in vars(args).items() if k not in ("func",)}
        self.manifest = RunManifest(args.command, {}, flags, getattr(args, "seed", None))

    def read_bytes(self, path: str | None, key: str = "input") -> bytes:
        if path in (None, "-"):
            data = self.stdin.buffer.read() if hasattr(self.stdin, "buffer") else self.stdin.read()
            if isinstance(data, str):
                data = data.encode()
            name = "<stdin>"
        else:
            try:
                data = Path(path).read_bytes()
            except OSError as exc:
                raise CliError(EXIT_IO, "io", f"cannot read {path}: {exc.strerror or exc}") from None
            name = path
        self.manifest.inputs[key] = {"path": name, "sha256": hashlib.sha256(data).hexdigest()}
        return data

    def graph(self):
        data = self.read_bytes(self.args.input)
        try:
            g, report = load_edge_list(data)
        except EdgeListParseError as exc:
            raise CliError(EXIT_PARSE, "parse", str(exc)) from None
        except GraphError as exc:
            raise CliError(EXIT_PARSE, "parse", str(exc)) from None
        self.manifest.extra["load_report"] = report.to_dict()
        if self.args.lcc:
            g = largest_connected_component(g)
            self.manifest.extra["lcc"] = {"nodes": g.node_count, "edges": g.edge_count}
        return g

    def write(self, text: str, path: str | None = None) -> None:
        path = self.args.output if path is None else path
        if path in (None, "-"):
            self.stdout.write(text)
            return
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(EXIT_IO, "io", f"cannot write {path}: {exc.strerror or exc}") from None


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return repr(float(x))


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_table(run: _Run, path: str, key: str) -> list[dict]:
    text = run.read_bytes(path, key).decode("utf-8")
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise CliError(EXIT_PARSE, "parse", f"{path}: no rows")
    return rows


def _column(rows, name, path, conv=float):
    try:
        return [conv(r[name]) for r in rows]
    except KeyError:
        raise CliError(EXIT_PARSE, "parse", f"{path}: missing column {name!r}") from None
    except ValueError as exc:
        raise CliError(EXIT_PARSE, "parse", f"{path}: column {name!r}: {exc}") from None


# subcommands


def cmd_metrics(run: _Run) -> None:
    g = run.graph()
    m = compute_metrics(g)
    rows = zip(g.labels, m.degree.tolist(), m.h_index.tolist(), m.h2_index.tolist(), m.shell_index.tolist())
    run.write(_csv(["node_label", "degree", "h_index", "h2_index", "shell_index"], rows))


def cmd_sir(run: _Run) -> None:
    a = run.args
    g = run.graph()
    try:
        lam = default_lambda(g) if a.auto_lambda or a.lam is None else a.lam
    except DegenerateGraphError as exc:
        raise CliError(EXIT_COMPUTE, "compute", str(exc)) from None
    if not 0 <= lam <= 1:
        raise CliError(EXIT_COMPUTE, "compute", f"infection probability {lam} outside [0, 1]")
    run.manifest.extra["lambda"] = lam
    try:
        cfg = SirConfig(lam, recovery_probability=a.mu, runs_per_seed=a.runs, rng_seed=a.seed)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, "usage", str(exc)) from None
    out = spreading_power_all(g, cfg, threads=a.threads)
    rows = ((lab, _num(p), _num(s)) for lab, p, s in zip(g.labels, out.spreading_power, out.std_dev))
    run.write(_csv(["node_label", "spreading_power", "std_dev"], rows))


def cmd_evaluate(run: _Run) -> None:
    a = run.args
    mrows = _read_table(run, a.metrics, "metrics")
    srows = _read_table(run, a.spreading, "spreading")
    power = dict(zip(_column(srows, "node_label", a.spreading, str), _column(srows, "spreading_power", a.spreading)))
    labels = _column(mrows, "node_label", a.metrics, str)
    missing = [lab for lab in labels if lab not in power]
    if missing or len(power) != len(labels):
        raise CliError(EXIT_PARSE, "parse", f"metrics and spreading tables cover different nodes ({len(missing)} unmatched)")
    try:
        row = ranking_report(
            _column(mrows, "shell_index", a.metrics, int),
            _column(mrows, "h2_index", a.metrics, int),
            [power[lab] for lab in labels],
        )
    except UndefinedCorrelationError as exc:
        raise CliError(EXIT_COMPUTE, "compute", str(exc)) from None
    if a.format == "csv":
        run.write(_csv(list(row), [[_num(v) if isinstance(v, float) else v for v in row.values()]]))
    else:
        run.write(_json(row))


def cmd_crawl(run: _Run) -> None:
    a = run.args
    g = run.graph()
    m = compute_metrics(g)
    max_index = None if a.oracle_free else m.max_h2
    try:
        cfg = CrawlConfig(repeat_limit=a.repeat_limit, max_index=max_index, variant=a.variant,
                          rng_seed=a.seed, stop_on_hit=not a.plateau, lazy=a.lazy)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, "usage", str(exc)) from None
    if a.start is not None:
        try:
            start = g.node_id(a.start)
        except (KeyError, GraphError):
            raise CliError(EXIT_USAGE, "usage", f"no node labelled {a.start!r}") from None
        records = [crawl(g, None if a.lazy else m, start, cfg)]
        summary = summarize(records)
    else:
        summary, records = crawl_all(g, m, cfg)
    lab = g.labels
    rows = (
        (lab[r.start_node], r.steps, r.restarts_used, int(r.succeeded), lab[r.terminal_node],
         r.visited_count, int(r.dead_end), lab[r.best_node])
        for r in records
    )
    run.write(_csv(["start_label", "steps", "restarts_used", "succeeded", "terminal_label",
                    "visited_count", "dead_end", "best_label"], rows))
    report = {
        **summary.to_dict(),
        "variant": a.variant,
        "repeat_limit": a.repeat_limit,
        "max_index": m.max_h2,
        "top_nodes_connected": top_nodes_connected(g, m),
        "nodes": g.node_count,
    }
    if a.summary:
        run.write(_json(report), a.summary)
    else:
        run.manifest.extra["summary"] = report


def _curve_from_args(run: _Run) -> RankCurve:
    a = run.args
    if a.metrics:
        rows = _read_table(run, a.metrics, "metrics")
        return rank_curve(np.array(_column(rows, "h2_index", a.metrics, int)))
    return rank_curve(compute_metrics(run.graph()))


def cmd_rankfit(run: _Run) -> None:
    a = run.args
    curve = _curve_from_args(run)
    try:
        rep = heuristic_params(curve) if a.mode == "heuristic" else fit_best(curve)
    except FitError as exc:
        raise CliError(EXIT_COMPUTE, "compute", str(exc)) from None
    try:
        ev = evaluate_fit(curve, rep.params).to_dict()
    except UndefinedCorrelationError as exc:
        ev = {"error": str(exc)}
    out = {**rep.params.to_dict(), "converged": rep.converged, "iterations": rep.iterations,
           "sse": rep.sse, "mode": a.mode, "free": list(rep.free), "curve_points": len(curve),
           "nodes": curve.n, "dropped_zero": curve.dropped_zero, "evaluation": ev}
    run.write(_json(out))
    if a.curve:
        model = logistic_eval(rep.params, curve.h2)
        rows = ((int(h), _num(p), _num(q)) for h, p, q in zip(curve.h2, curve.percentile, model))
        run.write(_csv(["h2", "actual_percentile", "model_percentile"], rows), a.curve)


def cmd_rank_of(run: _Run) -> None:
    a = run.args
    try:
        obj = json.loads(run.read_bytes(a.params, "params"))
        params = LogisticParams(*(float(obj[k]) for k in ("a1", "a2", "x0", "p")))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, "parse", f"{a.params}: not a parameter file ({exc})") from None
    lines = []
    for h in a.h2:
        if h < 0:
            raise CliError(EXIT_USAGE, "usage", "h2 must be non-negative")
        val = float(logistic_eval(params, h))
        lines.append(f"{h},{_num(val)}" if len(a.h2) > 1 else _num(val))
    run.write("\n".join(lines) + "\n")


def cmd_datasets(run: _Run) -> None:
    a = run.args
    if a.action == "list":
        rows = ((s.name, s.url or "", s.expected_nodes, s.expected_edges, s.note) for s in ds.REGISTRY.values())
        run.write(_csv(["name", "url", "nodes", "edges", "note"], rows))
        return
    if not a.names:
        raise CliError(EXIT_USAGE, "usage", f"datasets {a.action} needs at least one name")
    try:
        for n in a.names:
            ds.spec(n)
        if a.action == "fetch":
            results = [ds.fetch(n).to_dict() for n in a.names]
        else:
            results = [{"name": n, "path": str(p) if (p := ds.local_path(n)) else None} for n in a.names]
    except ds.DatasetError as exc:
        raise CliError(EXIT_DATASET, "dataset", str(exc)) from None
    run.write(_json({"data_dir": str(ds.data_dir()), "datasets": results}))


# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--input", "-i", help="edge list path, '-' or omitted for standard input")
    p.add_argument("--output", "-o", help="primary output path (default standard output)")
    p.add_argument("--threads", type=int, default=None, help="worker threads for parallel kernels")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--lcc", action="store_true", help="restrict to the largest connected component")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="h2index", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    p = sub.add_parser("metrics", parents=[common], help="degree, h, h2 and shell index per node")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sir", parents=[common], help="SIR spreading power of every node")
    lam = p.add_mutually_exclusive_group()
    lam.add_argument("--lambda", dest="lam", type=float, help="infection probability")
    lam.add_argument("--auto-lambda", action="store_true",
                     help="epidemic threshold + 0.01 (the default when --lambda is absent)")
    p.add_argument("--runs", type=int, default=100, help="runs per seed node (default 100)")
    p.add_argument("--mu", type=float, default=1.0, help="recovery probability (default 1)")
    p.set_defaults(func=cmd_sir)

    p = sub.add_parser("evaluate", parents=[common], help="ranking quality against SIR spreading power")
    p.add_argument("--metrics", required=True, help="CSV from the metrics subcommand")
    p.add_argument("--spreading", required=True, help="CSV from the sir subcommand")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("crawl", parents=[common], help="hill-climbing search for top h2 nodes")
    p.add_argument("--variant", choices=VARIANTS, default="index")
    p.add_argument("--repeat-limit", type=int, default=50)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--all", action="store_true", help="crawl from every non-top node")
    where.add_argument("--start", help="label of the start node")
    p.add_argument("--summary", help="path for the summary JSON (default: embedded in the manifest)")
    p.add_argument("--oracle-free", action="store_true",
                   help="do not tell the crawler the global maximum; it stops when its budget runs out")
    p.add_argument("--lazy", action="store_true", help="compute h2 only for promising neighbours")
    p.add_argument("--plateau", action="store_true",
                   help="keep walking across equal-h2 neighbours after reaching a top node")
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("rankfit", parents=[common], help="fit the logistic percentile-rank curve")
    p.add_argument("--mode", choices=("best-fit", "heuristic"), default="best-fit")
    p.add_argument("--metrics", help="metrics CSV to use instead of an edge list")
    p.add_argument("--curve", help="path for the curve CSV (h2, actual, model)")
    p.set_defaults(func=cmd_rankfit)

    p = sub.add_parser("rank-of", parents=[common], help="estimated percentile rank for given h2 values")
    p.add_argument("--params", required=True, help="JSON written by rankfit")
    p.add_argument("--h2", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_rank_of)

    p = sub.add_parser("datasets", parents=[common], help=f"benchmark datasets (cache dir from ${ds.ENV_VAR})")
    p.add_argument("action", choices=("list", "fetch", "path"))
    p.add_argument("names", nargs="*")
    p.set_defaults(func=cmd_datasets)
    return parser


def _fail(stderr, code: int, kind: str, message: str) -> int:
    stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def run(argv=None, *, stdin=None, stdout=None, stderr=None) -> int:
    """Execute one CLI invocation and return its exit code."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except CliError as exc:
        return _fail(stderr, exc.code, exc.kind, str(exc))
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.threads is not None and args.threads < 1:
        return _fail(stderr, EXIT_USAGE, "usage", "--threads must be positive")
    r = _Run(args, stdin, stdout)
    t0 = time.perf_counter()
    try:
        args.func(r)
    except CliError as exc:
        return _fail(stderr, exc.code, exc.kind, str(exc))
    r.manifest.duration_s = round(time.perf_counter() - t0, 6)
    text = r.manifest.to_json()
    stderr.write(text + "\n")
    if args.output not in (None, "-"):
        r.write(text + "\n", f"{args.output}.manifest.json")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
