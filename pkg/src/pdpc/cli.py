"""Command line interface: ``pdpc {cluster,gen,bench}``."""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import _backend
from .bench import SWEEPS, BenchSpec, RunReport, bench_sweep
from .datagen import KINDS, GenSpec, generate
from .geometry import DpcParams, UsageError
from .io import (dedup_points, read_points, write_binary, write_decision_graph,
                 write_labels, write_points)
from .pipeline import STRATEGIES, run_dpc

EXIT_USAGE = 2
EXIT_IO = 1


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(float(t)) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _count(text: str) -> int:
    # accept 1e5 style sizes
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdpc", description="Exact density peaks clustering.")
    parser.add_argument("--backend", choices=("auto",) + _backend.NAMES, default="auto",
                        help="kernel implementation (default: compiled when built)")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cluster", help="cluster a CSV point file")
    c.add_argument("--input", required=True, help="CSV (or binary cache) of points")
    c.add_argument("--dcut", type=float, required=True)
    c.add_argument("--rho-min", type=float, required=True)
    c.add_argument("--delta-min", type=float, required=True)
    c.add_argument("--algo", choices=STRATEGIES, default="priority")
    c.add_argument("--threads", type=int, default=0, help="workers; 0 = all cores")
    c.add_argument("--labels-out", required=True)
    c.add_argument("--decision-graph", metavar="FILE")
    c.add_argument("--report-json", metavar="FILE")
    c.add_argument("--dedup", action="store_true",
                   help="drop exact duplicate points first; ids then refer to "
                        "the deduplicated set")

    g = sub.add_parser("gen", help="write a synthetic point set")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=_count, required=True)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--clusters", type=int, default=10)
    g.add_argument("--extent", type=float, default=1e5)
    g.add_argument("--format", choices=("csv", "binary"), default="csv")
    g.add_argument("--out", required=True)

    b = sub.add_parser("bench", help="timing sweep over size, threads or d_cut")
    b.add_argument("--sweep", choices=SWEEPS, required=True)
    b.add_argument("--algo", action="append", choices=STRATEGIES,
                   help="strategy to time (repeatable; default priority)")
    b.add_argument("--kind", choices=KINDS,
                   help="dataset family (default simden; uniform for dcut)")
    b.add_argument("--n", type=_count, default=100_000)
    b.add_argument("--d", type=int, default=2)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--sizes", type=_int_list, help="size grid, e.g. 1000,10000")
    b.add_argument("--thread-grid", type=_int_list, help="worker grid, e.g. 1,2,4,8")
    b.add_argument("--fractions", type=_float_list,
                   help="mean-neighbor fractions for the dcut sweep")
    b.add_argument("--dcut", type=float)
    b.add_argument("--rho-min", type=float, default=2.0)
    b.add_argument("--delta-min", type=float)
    b.add_argument("--threads", type=int, default=0)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--out", help="output file (default stdout)")
    return parser


def cmd_cluster(args) -> int:
    ps = read_points(args.input)
    if args.dedup:
        before = ps.n
        ps, _ = dedup_points(ps)
        print(f"dedup: kept {ps.n} of {before} points", file=sys.stderr)
    params = DpcParams(args.dcut, args.rho_min, args.delta_min)
    if args.threads < 0:
        raise UsageError("--threads must be >= 0")
    res = run_dpc(ps, params, args.algo, threads=args.threads, backend=args.backend)
    write_labels(args.labels_out, res)
    if args.decision_graph:
        write_decision_graph(args.decision_graph, res)
    if args.report_json:
        rep = RunReport.from_result(res, ps.d)
        with open(args.report_json, "w", encoding="utf-8") as fh:
            json.dump(rep.to_json(), fh, indent=2)
            fh.write("\n")
    return 0


def cmd_gen(args) -> int:
    ps = generate(GenSpec(args.kind, args.n, args.d, args.seed, args.clusters, args.extent))
    (write_binary if args.format == "binary" else write_points)(args.out, ps)
    return 0


def cmd_bench(args) -> int:
    kind = args.kind or ("uniform" if args.sweep == "dcut" else "simden")
    spec = BenchSpec(args.sweep, tuple(args.algo or ("priority",)), kind, args.n,
                     args.d, args.seed, rho_min=args.rho_min,
                     delta_min=args.delta_min, d_cut=args.dcut,
                     workers=args.threads, backend=args.backend)
    if args.sizes:
        spec.sizes = args.sizes
    if args.thread_grid:
        spec.threads = args.thread_grid
    if args.fractions:
        spec.fractions = args.fractions
    rows = bench_sweep(spec)
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if args.format == "json":
            json.dump([r.to_json() for r in rows], out, indent=2)
            out.write("\n")
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(rows[0].csv_header())
            w.writerows(r.csv_row() for r in rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


COMMANDS = {"cluster": cmd_cluster, "gen": cmd_gen, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend == "auto":
        args.backend = None
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pdpc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImportError as exc:
        print(f"pdpc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pdpc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
