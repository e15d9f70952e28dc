"""Command-line interface: ``wspan generate|pairs|build|verify|harness|bench``.

Exit codes: 0 pass, 1 stretch or lemma violation, 2 argument/parse error,
3 construction failure, 4 spanner not contained in the graph.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from wspan.constructions import (
    DEFAULT_BUDGET_CAP,
    DEFAULT_MAX_ROUNDS,
    MULTIPLIERS,
    ConstructionFailure,
    all_pairs_spanner,
    pairwise_spanner,
    subset_spanner_4w,
)
from wspan.generators import KINDS, generate, random_graph, random_pairs
from wspan.graph import (
    DemandPairSet,
    GraphError,
    Subgraph,
    WeightedGraph,
    load_graph,
    read_edge_triples,
    read_nodes,
    read_pairs,
    write_edgelist,
    write_pairs,
)
from wspan.verify import lemma_harness, verify_stretch

log = logging.getLogger("wspan")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CONSTRUCTION, EXIT_CONTAINMENT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("SPANNER_SEED")
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"SPANNER_SEED must be an integer, got {raw!r}") from None
    return seed


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _mode(value: str) -> str:
    key = value.lower()
    if key not in MULTIPLIERS:
        raise argparse.ArgumentTypeError("mode must be 2w, 4w or 8w")
    return key


def _int_list(value: str) -> list[int]:
    return [int(x) for x in value.split(",") if x.strip()]


def _open_out(path: str | None):
    return open(path, "w") if path and path != "-" else None


def _emit(text: str, path: str | None) -> None:
    fh = _open_out(path)
    if fh is None:
        sys.stdout.write(text)
    else:
        with fh:
            fh.write(text)


def _demands(args, g: WeightedGraph) -> tuple[str, DemandPairSet, list[int] | None]:
    chosen = [x for x in (args.pairs, args.subset, args.all_pairs or None) if x]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --pairs, --subset, --all-pairs")
    if args.pairs:
        with open(args.pairs) as fh:
            return "pairs", read_pairs(fh, g.n), None
    if args.subset:
        with open(args.subset) as fh:
            nodes = read_nodes(fh)
        for x in nodes:
            g.check_node(x)
        return "subset", DemandPairSet.subset(nodes), nodes
    return "all-pairs", DemandPairSet.all_pairs(g.n), None


# -- generate -----------------------------------------------------------------


def cmd_generate(args) -> int:
    kw = {"w_max": args.w_max, "unit": args.unit}
    if args.kind in ("random-uniform", "random-power-weight"):
        if args.n is None or args.m is None:
            raise UsageError(f"{args.kind} needs --n and --m")
        kw.update(n=args.n, m=args.m, exponent=args.exponent)
    elif args.kind == "figure1":
        kw.update(d=args.d, ell=args.ell, epsilon=args.epsilon)
    elif args.kind == "grid":
        if args.rows is None or args.cols is None:
            raise UsageError("grid needs --rows and --cols")
        kw.update(rows=args.rows, cols=args.cols)
    try:
        g = generate(args.kind, seed=args.seed, **kw)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    buf = io.StringIO()
    write_edgelist(g, buf, comments=[f"kind={args.kind} seed={args.seed}"])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_pairs(args) -> int:
    try:
        pairs = random_pairs(args.n, args.p, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    buf = io.StringIO()
    write_pairs(pairs, buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- build --------------------------------------------------------------------


def _construct(g, mode, kind, pairs, nodes, args):
    if kind == "subset":
        if mode != "4w":
            raise UsageError("--subset requires --mode 4w")
        return subset_spanner_4w(g, nodes, args.d)
    if kind == "all-pairs":
        return all_pairs_spanner(
            g, mode, seed=args.seed, d=args.d, ell=args.ell, budget=args.budget,
            max_rounds=args.max_rounds, budget_cap=args.budget_cap,
        )
    return pairwise_spanner(
        g, pairs, mode, d=args.d, ell=args.ell, budget=args.budget,
        max_rounds=args.max_rounds, seed=args.seed, budget_cap=args.budget_cap,
    )


def cmd_build(args) -> int:
    g = load_graph(args.graph)
    kind, pairs, nodes = _demands(args, g)
    try:
        result = _construct(g, args.mode, kind, pairs, nodes, args)
    except ConstructionFailure as exc:
        print(json.dumps({"schema": 1, "error": str(exc),
                          "unsatisfied": exc.unsatisfied[:50]}), file=sys.stderr)
        return EXIT_CONSTRUCTION
    # independent re-check of the certificate
    report = verify_stretch(g, result.spanner, pairs, result.bound)
    meta = result.metadata()
    meta.update(demand=kind, graph=args.graph, verified=report.passed and result.verified)
    if args.format == "json":
        meta["spanner_edges"] = [[u, v, w] for u, v, w in result.spanner.edges()]
        _emit(json.dumps(meta, indent=2) + "\n", args.out)
    else:
        buf = io.StringIO()
        write_edgelist(result.spanner, buf, comments=[f"mode={result.mode} seed={args.seed}"])
        _emit(buf.getvalue(), args.out)
        meta_path = args.meta or (f"{args.out}.json" if args.out and args.out != "-" else None)
        if meta_path:
            with open(meta_path, "w") as fh:
                json.dump(meta, fh, indent=2)
                fh.write("\n")
        else:
            print(json.dumps(meta), file=sys.stderr)
    return EXIT_OK if meta["verified"] else EXIT_VIOLATION


# -- verify -------------------------------------------------------------------


def _load_spanner(path: str, g: WeightedGraph) -> tuple[Subgraph | None, list]:
    with open(path) as fh:
        n, triples = read_edge_triples(fh)
    bad = []
    ids = []
    if n != g.n:
        bad.append({"reason": f"node count {n} != {g.n}"})
    for u, v, w in triples:
        if not (0 <= u < g.n and 0 <= v < g.n) or u == v or not g.has_edge(u, v):
            bad.append({"u": u, "v": v, "reason": "edge not in graph"})
            continue
        e = g.edge_id(u, v)
        if float(g.ew[e]) != w:
            bad.append({"u": u, "v": v, "reason": f"weight {w!r} != {float(g.ew[e])!r}"})
            continue
        ids.append(e)
    if bad:
        return None, bad
    return Subgraph.from_edge_ids(g, ids), []


def cmd_verify(args) -> int:
    g = load_graph(args.graph)
    _, pairs, _ = _demands(args, g)
    if (args.bound is None) == (args.mode is None):
        raise UsageError("give exactly one of --bound or --mode")
    bound = args.bound if args.bound is not None else MULTIPLIERS[args.mode] * g.max_weight
    h, bad = _load_spanner(args.spanner, g)
    if h is None:
        doc = {"schema": 1, "contained": False, "problems": bad[:50]}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_CONTAINMENT
    report = verify_stretch(g, h, pairs, bound)
    doc = {
        "schema": 1,
        "contained": True,
        "pairs": len(pairs),
        "bound": bound,
        "max_additive_error": report.max_error,
        "violations": report.violations,
        "pass": report.passed,
        "spanner_edges": h.num_edges,
        "worst": report.worst(args.worst),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_VIOLATION


# -- harness ------------------------------------------------------------------


def cmd_harness(args) -> int:
    g = load_graph(args.graph)
    summary = lemma_harness(g, args.d, args.trials, args.seed, init=args.init)
    if args.witness_dir and summary.violations:
        os.makedirs(args.witness_dir, exist_ok=True)
        for i, v in enumerate(summary.violations):
            v.write(args.witness_dir, i)
    doc = {"schema": 1, "d": args.d, "init": args.init, **summary.as_dict()}
    if args.init != "light":
        doc["adjacent_counts"] = sorted(set(summary.adjacent_counts))
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if summary.passed else EXIT_VIOLATION


# -- bench --------------------------------------------------------------------


@dataclass
class BenchRecord:
    n: int
    m: int
    p: int
    mode: str
    d: int
    ell: int
    edges: int
    rounds: int
    wall_ms: float
    seed: int
    max_additive_error: float
    bound: float
    failed: bool = False
    error: str = ""


BENCH_FIELDS = ["schema"] + [f.name for f in fields(BenchRecord)]


def bench_density(n: int, exponent: float, coef: float) -> int:
    return int(min(n * (n - 1) // 2, max(n - 1, math.ceil(coef * n**exponent))))


def _bench_cell(cell) -> BenchRecord:
    n, mode, seed, opts = cell
    m = bench_density(n, opts["density_exponent"], opts["density_coef"])
    try:
        g = random_graph(n, m, seed=seed, exponent=opts["weight_exponent"])
    except ValueError as exc:
        return BenchRecord(n, m, 0, mode, 0, 0, 0, 0, 0.0, seed, math.nan, math.nan, True, str(exc))
    start = time.perf_counter()
    try:
        if opts["pairs"] == "all":
            result = all_pairs_spanner(g, mode, seed=seed)
        else:
            p = min(int(opts["pairs"]), n * (n - 1) // 2)
            result = pairwise_spanner(g, random_pairs(n, p, seed=seed), mode, seed=seed)
    except (ConstructionFailure, ValueError) as exc:
        return BenchRecord(n, g.m, 0, mode, 0, 0, 0, 0, 0.0, seed, math.nan, math.nan, True, str(exc))
    wall = (time.perf_counter() - start) * 1000.0
    return BenchRecord(
        n=n, m=g.m, p=result.p, mode=mode, d=result.params.d, ell=result.params.ell,
        edges=result.num_edges, rounds=result.rounds, wall_ms=round(wall, 3), seed=seed,
        max_additive_error=result.certificate.max_error, bound=result.bound,
    )


def fit_slopes(records: list[BenchRecord]) -> dict[str, float | None]:
    """Least-squares slope of log(edges) against log(n), per mode."""
    out: dict[str, float | None] = {}
    for mode in sorted({r.mode for r in records}):
        rows = [r for r in records if r.mode == mode and not r.failed]
        if len({r.n for r in rows}) < 2:
            out[mode] = None
            continue
        x = np.log([r.n for r in rows])
        y = np.log([r.edges for r in rows])
        out[mode] = float(np.polyfit(x, y, 1)[0])
    return out


def run_bench(sizes, modes, seeds, opts, jobs: int = 1) -> list[BenchRecord]:
    cells = [(n, mode, seed, opts) for n in sizes for mode in modes for seed in seeds]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bench_cell, cells))
    return [_bench_cell(c) for c in cells]


def write_bench_csv(records: list[BenchRecord], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow({"schema": 1, **asdict(r)})


def cmd_bench(args) -> int:
    modes = [_mode(m) for m in args.modes.split(",") if m.strip()]
    opts = {
        "density_exponent": args.density_exponent,
        "density_coef": args.density_coef,
        "weight_exponent": args.weight_exponent,
        "pairs": args.pairs,
    }
    if opts["pairs"] != "all" and not str(opts["pairs"]).isdigit():
        raise UsageError("--pairs must be 'all' or a positive integer")
    records = run_bench(_int_list(args.sizes), modes, _int_list(args.seeds), opts, args.jobs)
    buf = io.StringIO()
    write_bench_csv(records, buf)
    _emit(buf.getvalue(), args.out)
    if args.fit:
        summary = {"schema": 1, "slopes": fit_slopes(records),
                   "failures": sum(r.failed for r in records)}
        target = sys.stderr if not args.out or args.out == "-" else sys.stdout
        print(json.dumps(summary), file=target)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_demand_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pairs", help="demand-pair file ('u v' per line)")
    p.add_argument("--subset", help="source-node file (subset spanner)")
    p.add_argument("--all-pairs", action="store_true", help="every node pair")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wspan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded graph in edge-list format")
    p.add_argument("--kind", choices=KINDS, default="random-uniform")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--w-max", type=float, default=1.0)
    p.add_argument("--exponent", type=float, default=3.0, help="power-weight skew")
    p.add_argument("--unit", action="store_true", help="all weights equal --w-max")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pairs", help="write a seeded random demand-pair file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("build", help="construct and certify a spanner")
    p.add_argument("--graph", required=True)
    _add_demand_flags(p)
    p.add_argument("--mode", type=_mode, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--budget-cap", type=int, default=DEFAULT_BUDGET_CAP)
    p.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out")
    p.add_argument("--meta", help="metadata JSON path (edgelist format only)")
    p.add_argument("--format", choices=("edgelist", "json"), default="edgelist")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check a spanner file against a bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--spanner", required=True)
    _add_demand_flags(p)
    p.add_argument("--bound", type=float)
    p.add_argument("--mode", type=_mode)
    p.add_argument("--worst", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("harness", help="randomized neighborhood-lemma checks")
    p.add_argument("--graph", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--init", choices=("light", "adversarial"), default="light")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--witness-dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_harness)

    p = sub.add_parser("bench", help="size sweep over random graphs, CSV output")
    p.add_argument("--sizes", default="64,128,256")
    p.add_argument("--modes", default="2w,4w,8w")
    p.add_argument("--seeds", default="0")
    p.add_argument("--pairs", default="all", help="'all' or a pair count")
    p.add_argument("--density-exponent", type=float, default=1.8)
    p.add_argument("--density-coef", type=float, default=0.25)
    p.add_argument("--weight-exponent", type=float, default=1.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--fit", action="store_true", help="print log-log slope per mode")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except (UsageError, GraphError, ValueError, OSError) as exc:
        print(f"wspan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
