"""Command-line entry point: ``stclab <subcommand> [options]``.

Exit status: 0 success (or a consistent round trip), 1 inconsistency
detected, 2 usage or input errors, 3 timeout or inconclusive.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import StcLabError
from .generators import random_2p1n
from .graph import SpanningTree, WeightedGraph, tree_congestion
from .io import dump_json, graph_from_json, graph_to_json, to_dot, tree_from_json, tree_to_json
from .reduction import ReductionMap, reduce, roundtrip_check, verify_claims
from .sat import FormulaError, TwoPOneNFormula, assignment_to_json, parse_dimacs, solve_sat, write_dimacs
from .solver import SolveConfig, is_stc_at_most, stc_exact

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _need(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} requires --{name.replace('_', '-')}")


def _load_formula(args: argparse.Namespace) -> TwoPOneNFormula:
    _need(args, "cnf")
    return parse_dimacs(_read_text(args.cnf))


def _load_graph(args: argparse.Namespace) -> tuple[WeightedGraph, dict]:
    """The graph, plus the whole document (a ``reduce`` bundle also carries the map)."""
    _need(args, "graph")
    doc = _read_json(args.graph)
    if isinstance(doc, dict) and "graph" in doc:
        return graph_from_json(doc["graph"]), doc
    return graph_from_json(doc), {}


def _load_tree(path: str, g: WeightedGraph) -> SpanningTree:
    doc = _read_json(path)
    # Accept a solver result as well as a bare tree.
    if isinstance(doc, dict) and "certificate" in doc:
        doc = doc["certificate"]
    return tree_from_json(doc, g)


def _load_map(args: argparse.Namespace, bundle: dict) -> ReductionMap:
    if args.map is not None:
        return ReductionMap.from_json(_read_json(args.map))
    if "map" in bundle:
        return ReductionMap.from_json(bundle["map"])
    raise UsageError(f"{args.command} requires --map (or a graph file written by reduce)")


def _config(args: argparse.Namespace, k: int | None) -> SolveConfig:
    if args.timeout_ms <= 0:
        raise UsageError("--timeout-ms must be positive")
    return SolveConfig(k=k, timeout=args.timeout_ms / 1000, deterministic=args.deterministic)


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc


def cmd_reduce(args: argparse.Namespace) -> int:
    _need(args, "k")
    g, rmap = reduce(_load_formula(args), args.k)
    if args.map is not None:
        Path(args.map).write_text(dump_json(rmap.to_json()))
        _emit(args, dump_json(graph_to_json(g)))
    else:
        _emit(args, dump_json({"graph": graph_to_json(g), "map": rmap.to_json()}))
    return EXIT_OK


def cmd_stc_decide(args: argparse.Namespace) -> int:
    _need(args, "k")
    g, _ = _load_graph(args)
    result = is_stc_at_most(g, args.k, _config(args, args.k))
    out = result.to_json(deterministic=args.deterministic)
    out["k"] = args.k
    _emit(args, dump_json(out))
    return EXIT_TIMEOUT if result.decision == "timeout" else EXIT_OK


def cmd_stc_exact(args: argparse.Namespace) -> int:
    g, _ = _load_graph(args)
    result = stc_exact(g, _config(args, None))
    _emit(args, dump_json(result.to_json(deterministic=args.deterministic)))
    return EXIT_TIMEOUT if result.decision == "timeout" else EXIT_OK


def cmd_sat_solve(args: argparse.Namespace) -> int:
    assignment = solve_sat(_load_formula(args))
    out: dict = {"satisfiable": assignment is not None}
    if assignment is not None:
        out["assignment"] = assignment_to_json(assignment)
    _emit(args, dump_json(out))
    return EXIT_OK


def cmd_roundtrip(args: argparse.Namespace) -> int:
    _need(args, "k")
    verdict = roundtrip_check(_load_formula(args), args.k, _config(args, args.k))
    out = verdict.to_json()
    if args.deterministic:
        out["elapsed_ms"] = 0
    _emit(args, dump_json(out))
    return {"consistent": EXIT_OK, "inconsistent": EXIT_INCONSISTENT}.get(verdict.verdict, EXIT_TIMEOUT)


def cmd_verify_tree(args: argparse.Namespace) -> int:
    _need(args, "tree")
    g, _ = _load_graph(args)
    report = tree_congestion(_load_tree(args.tree, g), witnesses=True)
    out = report.to_json()
    if args.k is not None:
        out["k"] = args.k
        out["within_k"] = report.max_congestion <= args.k
    _emit(args, dump_json(out))
    return EXIT_OK


def cmd_claims(args: argparse.Namespace) -> int:
    _need(args, "tree")
    g, bundle = _load_graph(args)
    rmap = _load_map(args, bundle)
    report = verify_claims(_load_tree(args.tree, g), rmap)
    out = report.to_json()
    out["all_pass"] = report.all_pass
    _emit(args, dump_json(out))
    return EXIT_OK


def cmd_export_dot(args: argparse.Namespace) -> int:
    g, _ = _load_graph(args)
    tree = _load_tree(args.tree, g) if args.tree is not None else None
    if args.format == "json":
        out: dict = {"graph": graph_to_json(g)}
        if tree is not None:
            out["tree"] = tree_to_json(tree)
        _emit(args, dump_json(out))
    else:
        _emit(args, to_dot(g, tree))
    return EXIT_OK


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    _need(args, "seed", "out")
    if args.count < 1:
        raise UsageError("--count must be positive")
    sizes = args.num_vars or [2, 3, 4]
    if min(sizes) < 1:
        raise UsageError("--num-vars must be positive")
    rng = random.Random(args.seed)
    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    draws = 0
    for i in range(args.count):
        n = sizes[i % len(sizes)]
        # Unsatisfiable formulas are rare (none below four variables), so the filter is capped.
        for _ in range(args.max_draws):
            formula = random_2p1n(rng, n)
            draws += 1
            sat = solve_sat(formula) is not None
            if args.only == "any" or sat == (args.only == "sat"):
                break
        else:
            raise UsageError(f"no {args.only} formula with {n} variables in {args.max_draws} draws")
        name = f"phi_s{args.seed}_{args.only}_{i:03d}_n{n}.cnf"
        header = [f"seed={args.seed} index={i} draw={draws} num_vars={n} only={args.only}",
                  "generated by stclab gen-corpus"]
        (root / name).write_text(write_dimacs(formula, comments=header))
        entries.append({"file": name, "num_vars": n, "clauses": len(formula.clauses), "satisfiable": sat})
    manifest = {"seed": args.seed, "count": args.count, "only": args.only, "formulas": entries}
    (root / f"manifest_s{args.seed}_{args.only}.json").write_text(dump_json(manifest))
    sys.stdout.write(dump_json(manifest))
    return EXIT_OK


COMMANDS = {
    "reduce": (cmd_reduce, "CNF formula -> reduced graph and reduction map"),
    "stc-decide": (cmd_stc_decide, "decide whether stc(G) <= K"),
    "stc-exact": (cmd_stc_exact, "compute stc(G) with an optimal tree"),
    "sat-solve": (cmd_sat_solve, "solve a (2P1N)-SAT formula"),
    "roundtrip": (cmd_roundtrip, "check satisfiability against the K-STC decision"),
    "verify-tree": (cmd_verify_tree, "congestion report of a spanning tree"),
    "claims": (cmd_claims, "check the structural claims on a tree of a reduced graph"),
    "export-dot": (cmd_export_dot, "Graphviz rendering of a graph and optional tree"),
    "gen-corpus": (cmd_gen_corpus, "write seeded random (2P1N) formulas"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cnf", help="DIMACS CNF input")
    common.add_argument("--graph", help="graph JSON (or a reduce bundle)")
    common.add_argument("--map", help="reduction map JSON")
    common.add_argument("--tree", help="spanning tree JSON (or a solver result)")
    common.add_argument("--k", type=int, help="congestion bound K")
    common.add_argument("--timeout-ms", type=int, default=600_000, help="solver budget (default 600000)")
    common.add_argument("--deterministic", action="store_true", help="zero wall-clock fields in outputs")
    common.add_argument("--seed", type=int, help="seed for gen-corpus")
    common.add_argument("--count", type=int, default=20, help="gen-corpus: number of formulas")
    common.add_argument("--num-vars", type=int, nargs="+", help="gen-corpus: variable counts, cycled")
    common.add_argument("--only", choices=("any", "sat", "unsat"), default="any",
                        help="gen-corpus: keep only formulas of this kind")
    common.add_argument("--max-draws", type=int, default=100_000, help="gen-corpus: draws per formula")
    common.add_argument("--out", help="output path (directory for gen-corpus); default stdout")
    common.add_argument("--format", choices=("json", "dot"), default="dot", help="export-dot output format")

    parser = argparse.ArgumentParser(prog="stclab", description="Spanning tree congestion laboratory.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except FormulaError as exc:
        for v in exc.violations:
            print(f"stclab {args.command}: {v.message}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, StcLabError, ValueError) as exc:
        print(f"stclab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
