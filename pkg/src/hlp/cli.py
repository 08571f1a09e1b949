"""Command-line front end.

    hlp detect [--method hlp|lp|ds|kcore] [--seed N] graph.txt
    hlp eval [--json] graph.txt

Exit codes: 0 success, 1 internal invariant violation, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import time
import json
import sys
from pathlib import Path

from hlp.baselines import DegenerateInputError, densest_subgraph_peel, kcore_split
from hlp.export import write_hierarchy_json, write_supergraph_dot
from hlp.graph import FORMATS, Graph, ParseError, read_graph
from hlp.hierarchy import (Hierarchy, InvariantError, Level, LevelStats, build_hierarchy,
                           check_hierarchy, create_super_graph, project_to_base)
from hlp.labelprop import Assignment, LpParams, run_propagation
from hlp.metrics import UndefinedMetricError, best_level_modularity, modularity

METHODS = ("hlp", "lp", "ds", "kcore")
EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2

COLUMNS = ("level", "nodes", "edges", "communities", "iterations", "elapsed_s", "modularity")
# index of the elapsed column in table rows, for callers that mask timings
ELAPSED_COLUMN = COLUMNS.index("elapsed_s")


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("input", help="edge list or Matrix Market file")
    p.add_argument("--format", choices=FORMATS, default=None,
                   help="input format (default: mtx for *.mtx, else edgelist)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100, help="LP iteration cap per level")
    p.add_argument("--delta", type=int, default=3, help="iterations unchanged before a node freezes")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hlp", description="Hierarchical label propagation")
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="detect communities and print per-level statistics")
    _add_common(det)
    det.add_argument("--method", choices=METHODS, default="hlp")
    det.add_argument("--export", choices=("json", "dot"), default=None)
    det.add_argument("--level", type=int, default=None, help="level to export as DOT")
    det.add_argument("--output", default=None, help="export path (DOT: prefix when no --level)")

    ev = sub.add_parser("eval", help="modularity of hlp, lp, ds and kcore on one graph")
    _add_common(ev)
    return parser


def _params(args) -> LpParams:
    try:
        return LpParams(max_iters=args.max_iters, delta=args.delta, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(args) -> Graph:
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")
    return read_graph(path, format=args.format)


def _single_level(g: Graph, a: Assignment, iterations: int, elapsed: float,
                  params: LpParams) -> Hierarchy:
    sup = create_super_graph(g, a)
    stats = LevelStats(nodes=g.n, edges=g.m, communities=a.k,
                       iterations=iterations, elapsed=elapsed)
    return Hierarchy(base=g, levels=[Level(assignment=a, supergraph=sup, stats=stats)],
                     params=params)


def _run_method(g: Graph, method: str, params: LpParams) -> Hierarchy:
    if method == "hlp":
        return build_hierarchy(g, params)
    tic = time.perf_counter()
    if method == "lp":
        run = run_propagation(g, params)
        a, iters = run.assignment, run.iterations
    elif method == "ds":
        a, iters = densest_subgraph_peel(g), 0
    else:
        a, iters = kcore_split(g), 0
    return _single_level(g, a, iters, time.perf_counter() - tic, params)


def _level_modularity(h: Hierarchy, t: int):
    try:
        return modularity(h.base, project_to_base(h, t))
    except UndefinedMetricError:
        return None


def _print_table(h: Hierarchy, out):
    widths = [max(len(c), 11) for c in COLUMNS]
    print("  ".join(c.rjust(w) for c, w in zip(COLUMNS, widths)), file=out)
    for t, level in enumerate(h.levels, start=1):
        s = level.stats
        q = _level_modularity(h, t)
        cells = [str(t), str(s.nodes), str(s.edges), str(s.communities), str(s.iterations),
                 f"{s.elapsed:.4f}", "-" if q is None else f"{q:.6f}"]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)), file=out)


def _export(h: Hierarchy, args, out):
    if args.export is None:
        return
    if args.output is None:
        raise UsageError("--export needs --output")
    name = Path(args.input).name
    if args.export == "json":
        write_hierarchy_json(h, args.output, name=name)
        print(f"wrote {args.output}", file=out)
        return
    if args.level is not None:
        if not 1 <= args.level <= len(h.levels):
            raise UsageError(f"--level {args.level} out of range 1..{len(h.levels)}")
        write_supergraph_dot(h, args.level, args.output)
        print(f"wrote {args.output}", file=out)
        return
    prefix = Path(args.output)
    stem = prefix.name[:-4] if prefix.name.endswith(".dot") else prefix.name
    for t in range(1, len(h.levels) + 1):
        path = prefix.with_name(f"{stem}.level{t}.dot")
        write_supergraph_dot(h, t, path)
        print(f"wrote {path}", file=out)


def cmd_detect(args, out=None) -> int:
    out = out or sys.stdout
    params = _params(args)
    if args.level is not None and args.export != "dot":
        raise UsageError("--level only applies to --export dot")
    g = _load(args)
    h = _run_method(g, args.method, params)
    check_hierarchy(h)
    if args.json:
        rows = []
        for t, level in enumerate(h.levels, start=1):
            s = level.stats
            rows.append({"level": t, "nodes": s.nodes, "edges": s.edges,
                         "communities": s.communities, "iterations": s.iterations,
                         "elapsed": s.elapsed, "modularity": _level_modularity(h, t)})
        print(json.dumps({"method": args.method, "n": g.n, "m": g.m, "levels": rows}), file=out)
    else:
        print(f"# {Path(args.input).name}: n={g.n} m={g.m} method={args.method} "
              f"seed={params.seed} max_iters={params.max_iters} delta={params.delta}", file=out)
        _print_table(h, out)
    _export(h, args, out)
    return EXIT_OK


def cmd_eval(args, out=None) -> int:
    out = out or sys.stdout
    params = _params(args)
    g = _load(args)
    if g.m == 0:
        raise UndefinedMetricError("modularity is undefined for a graph without edges")
    records = []
    h = build_hierarchy(g, params)
    check_hierarchy(h)
    t, q = best_level_modularity(h)
    records.append({"method": "hlp", "modularity": q, "communities": h.levels[t - 1].stats.communities,
                    "level": t})
    run = run_propagation(g, params)
    records.append({"method": "lp", "modularity": modularity(g, run.assignment),
                    "communities": run.assignment.k, "level": None})
    for name, fn in (("ds", densest_subgraph_peel), ("kcore", kcore_split)):
        a = fn(g)
        records.append({"method": name, "modularity": modularity(g, a),
                        "communities": a.k, "level": None})
    if args.json:
        for r in records:
            print(json.dumps(r), file=out)
    else:
        print(f"# {Path(args.input).name}: n={g.n} m={g.m} seed={params.seed}", file=out)
        print(f"{'method':>8}  {'modularity':>10}  {'communities':>11}  {'level':>5}", file=out)
        for r in records:
            level = "-" if r["level"] is None else str(r["level"])
            print(f"{r['method']:>8}  {r['modularity']:>10.6f}  {r['communities']:>11}  {level:>5}",
                  file=out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = cmd_detect if args.command == "detect" else cmd_eval
    try:
        return handler(args)
    except (UsageError, ParseError, UndefinedMetricError, DegenerateInputError, OSError) as exc:
        print(f"hlp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"hlp: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
