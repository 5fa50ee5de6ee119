"""Command-line front end.

Exit codes: 0 success, 1 parse or validation failure, 2 infeasible
instance, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .dp import solve
from .graph import GraphParseError, format_graph, read_graph
from .instances import random_instance
from .objectives import INFEASIBLE, PROBLEMS, format_value, make_objective
from .oracle import MAX_ORACLE_N, TooLarge, brute_force_solve
from .pipeline import InvalidDecomposition, prepare_decomposition
from .treedecomp import (
    DecompositionError,
    TDParseError,
    TreeDecomposition,
    format_td,
    nicify,
    read_td,
    shrink,
    validate,
)

log = logging.getLogger("twcut")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_MISMATCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_graph_args(p, td_required=False):
    p.add_argument("--graph", required=True, help="graph file (p/e lines, 1-indexed)")
    p.add_argument("--td", required=td_required, help=".td decomposition file")
    p.add_argument("--root", type=int, help="bag id to use as the root (default: bag 1)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--directed", dest="directed", action="store_true", help="edge lines are arcs u->v")
    mode.add_argument("--undirected", dest="directed", action="store_false", help="edge lines are undirected (default)")
    p.set_defaults(directed=False)


def _add_problem_args(p):
    p.add_argument("--problem", required=True, choices=PROBLEMS)
    p.add_argument("--beta", type=_rational, help="balance parameter p/q for balanced-min-cut")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twcut", description="Exact cut problems on graphs of bounded treewidth.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a cut problem")
    _add_graph_args(p)
    _add_problem_args(p)
    p.add_argument("--witness", action="store_true", help="also output an optimal vertex set")
    p.add_argument("--oracle-check", action="store_true", help=f"cross-check with brute force (n <= {MAX_ORACLE_N})")
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("validate", help="check a decomposition against a graph")
    _add_graph_args(p, td_required=True)

    p = sub.add_parser("nicify", help="print the nice decomposition used by the solver")
    _add_graph_args(p)

    p = sub.add_parser("oracle", help="brute-force optimum")
    _add_graph_args(p)
    _add_problem_args(p)
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("gen", help="write a random instance with its decomposition")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--width", type=int, required=True, help="maximum bag size minus one")
    p.add_argument("--density", type=float, default=0.6)
    p.add_argument("--weights", default="0:5", help="weight range lo:hi (rationals)")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.gr and PREFIX.td")

    p = sub.add_parser("bench", help="time the solver on a seeded grid, CSV to stdout")
    p.add_argument("--sizes", type=_int_list, default=[100, 200, 400])
    p.add_argument("--widths", type=_int_list, default=[2, 3, 4])
    p.add_argument("--seeds", type=_int_list, default=[0])
    p.add_argument("--problem", choices=PROBLEMS, default="max-bisection")
    p.add_argument("--beta", type=_rational)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _load(args):
    G = read_graph(args.graph, directed=args.directed)
    td = read_td(args.td, n=G.n, root=args.root) if args.td else None
    return G, td


def _emit(record: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(record, indent=2))
        return
    for key, value in record.items():
        if isinstance(value, dict):
            value = ", ".join(f"{k}={v}" for k, v in value.items())
        elif isinstance(value, list):
            value = " ".join(str(v) for v in value)
        print(f"{key}: {value}")


def _cmd_solve(args) -> int:
    G, td = _load(args)
    obj = make_objective(args.problem, G.n, beta=args.beta)
    nice, source = prepare_decomposition(G, td)
    report = solve(G, nice, obj, want_witness=args.witness)
    stats = dict(report.stats)
    record = {
        "problem": args.problem,
        "n": G.n,
        "m": G.m,
        "width": nice.width,
        "width_source": source,
        "nodes": nice.num_nodes,
        "value": format_value(report.optimum),
        "count": report.count,
    }
    if report.witness is not None:
        record["witness"] = sorted(v + 1 for v in report.witness)
    if args.beta is not None:
        record["beta"] = str(args.beta)
    record["stats"] = stats
    code = EXIT_INFEASIBLE if report.optimum is INFEASIBLE else EXIT_OK
    if args.oracle_check:
        oracle = brute_force_solve(G, obj)
        record["oracle"] = format_value(oracle.optimum)
        if oracle.optimum != report.optimum:
            log.error("oracle mismatch: solver %s, oracle %s", record["value"], record["oracle"])
            code = EXIT_MISMATCH
    _emit(record, args.format)
    return code


def _cmd_validate(args) -> int:
    G, td = _load(args)
    problem = validate(G, td)
    if problem is None:
        print(f"ok: {td.num_nodes} bags, width {td.width}")
        return EXIT_OK
    print(problem.describe())
    return EXIT_INPUT


def _cmd_nicify(args) -> int:
    G, td = _load(args)
    nice, _ = prepare_decomposition(G, td)
    notes = []
    for x in nice.nodes:
        note = x.kind.value
        if x.vertex is not None:
            note += f" {x.vertex + 1}"
        notes.append(note)
    sys.stdout.write(format_td(nice.as_tree_decomposition(), G.n, notes))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    G, _ = _load(args)
    obj = make_objective(args.problem, G.n, beta=args.beta)
    res = brute_force_solve(G, obj)
    record = {
        "problem": args.problem,
        "n": G.n,
        "value": format_value(res.optimum),
        "witnesses": [sorted(v + 1 for v in W) for W in res.all_optimal_witnesses],
    }
    _emit(record, args.format)
    return EXIT_INFEASIBLE if res.optimum is INFEASIBLE else EXIT_OK


def _cmd_gen(args) -> int:
    try:
        lo, hi = (Fraction(x) for x in args.weights.split(":"))
    except (ValueError, ZeroDivisionError):
        log.error("bad --weights %r, expected lo:hi", args.weights)
        return EXIT_INPUT
    G, td = random_instance(args.seed, args.n, args.width, args.density, (lo, hi), args.directed)
    # the .td format has no root field; renumber so the root is bag 1
    order = [td.root] + [i for i in range(td.num_nodes) if i != td.root]
    pos = {old: new for new, old in enumerate(order)}
    rooted = TreeDecomposition([td.bags[i] for i in order], [(pos[a], pos[b]) for a, b in td.edges], 0)
    Path(f"{args.out}.gr").write_text(format_graph(G, directed=args.directed))
    Path(f"{args.out}.td").write_text(format_td(rooted, G.n))
    print(f"{args.out}.gr {args.out}.td")
    return EXIT_OK


def _bench_point(point):
    n, t, seed, problem, beta = point
    G, td = random_instance(seed, n, t)
    nice = nicify(shrink(td), G)
    obj = make_objective(problem, G.n, beta=beta)
    report = solve(G, nice, obj)
    return {
        "n": n,
        "t": nice.width,
        "seed": seed,
        "nodes": nice.num_nodes,
        "join_pair_sum": report.stats["join_pair_sum"],
        "elapsed": f"{report.stats['elapsed']:.6f}",
    }


def _cmd_bench(args) -> int:
    points = [
        (n, t, s, args.problem, args.beta)
        for n in args.sizes
        for t in args.widths
        for s in args.seeds
        if t < n
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_point, points))
    else:
        rows = [_bench_point(p) for p in points]
    writer = csv.DictWriter(sys.stdout, ["n", "t", "seed", "nodes", "join_pair_sum", "elapsed"])
    writer.writeheader()
    writer.writerows(rows)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "nicify": _cmd_nicify,
    "oracle": _cmd_oracle,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except InvalidDecomposition as exc:
        print(exc.violation.describe(), file=sys.stderr)
        return EXIT_INPUT
    except (GraphParseError, TDParseError, DecompositionError, TooLarge, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())
