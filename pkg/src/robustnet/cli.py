"""Command line interface: ``robustnet {reduce,solve,verify,bench}``.

Exit codes: 0 success, 1 refusal (size caps, infeasible input),
2 usage or parse error, 3 a verification or harness check failed.
Data goes to stdout or ``--out``; diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .cnf import parse_dimacs
from .exceptions import FormatError, InfeasibleError, InvalidInstanceError, SizeLimitError
from .formats import parse_instance, parse_solution, serialize_instance, serialize_solution
from .model import check_instance, minmax_value
from .reduce import MODES, AmplifyParams, amplify, path_to_tree, reduce_formula
from .robust import DEFAULT_LIMIT, mean_scenario_heuristic, solve_exact
from .verify import (
    DEFAULT_SAMPLES,
    GAP_HEADER,
    RatioConfig,
    check_gap,
    check_regret_equals_minmax,
    empirical_ratios,
    ratio_csv,
)

EXIT_OK, EXIT_REFUSED, EXIT_USAGE, EXIT_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _diag(msg):
    print(msg, file=sys.stderr)


# -- subcommands ------------------------------------------------------------


def cmd_reduce(args):
    if args.to_tree:
        if args.instance is None or args.solution is None:
            raise UsageError("--to-tree needs --instance and --solution")
        if args.out is None and args.solution_out is None:
            raise UsageError("--to-tree needs --out or --solution-out so stdout holds one document")
        inst = check_instance(parse_instance(_read(args.instance)))
        _, path = parse_solution(_read(args.solution))
        tree_inst, tree = path_to_tree(inst, path)
        value = minmax_value(tree_inst, tree)
        if args.out is not None:
            _emit(serialize_instance(tree_inst), args.out)
            if args.solution_out is None:
                _emit(serialize_solution(tree, value), None)
        if args.solution_out is not None:
            _emit(serialize_solution(tree, value), args.solution_out)
            if args.out is None:
                _emit(serialize_instance(tree_inst), None)
        _diag(f"tree: {len(tree)} edges, minmax {value}")
        return EXIT_OK

    if args.cnf is None or args.family is None:
        raise UsageError("reduce needs --cnf and --family (or --to-tree)")
    cnf = parse_dimacs(_read(args.cnf))
    base, pairs = reduce_formula(cnf, args.family)
    if args.levels == 0:
        inst = base
    else:
        inst = amplify(base, pairs, AmplifyParams(args.levels, args.mode, True, args.max_entries))
    _emit(serialize_instance(inst), args.out)
    _diag(f"{inst.family}: {inst.graph.node_count} nodes, {inst.edge_count} edges, {inst.scenario_count} scenarios")
    return EXIT_OK


def cmd_solve(args):
    inst = check_instance(parse_instance(_read(args.instance)))
    if args.objective == "mean":
        res = mean_scenario_heuristic(inst, "minmax")
        _diag("method: heuristic (value is the true minmax of the heuristic solution)")
    else:
        res = solve_exact(inst, args.objective, args.method, limit=args.limit)
        _diag(f"method: {res.method}")
    doc = serialize_solution(res.solution, res.value)
    if args.out is None:
        sys.stdout.write(doc)
    else:
        Path(args.out).write_text(doc)
        sys.stdout.write(f"{res.value}\n")
    return EXIT_OK


def _gap_task(task):
    cnf_text, formula_id, family, level, mode, samples, seed = task
    return check_gap(parse_dimacs(cnf_text), family, level, mode, formula_id, samples, seed)


def cmd_verify(args):
    if args.regret_identity:
        if args.instance is None:
            raise UsageError("--regret-identity needs --instance")
        inst = check_instance(parse_instance(_read(args.instance)))
        result = check_regret_equals_minmax(inst, args.method)
        sys.stdout.write(result.to_text())
        return EXIT_OK if result.holds else EXIT_FAILED

    if not args.cnf or not args.family:
        raise UsageError("verify needs --cnf and --family (or --regret-identity)")
    tasks = []
    for path in args.cnf:
        text = _read(path)
        parse_dimacs(text)
        for family in args.family:
            for level in args.levels:
                tasks.append((text, Path(path).stem, family, level, args.mode, args.samples, args.seed))
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            reports = list(pool.map(_gap_task, tasks))
    else:
        reports = [_gap_task(t) for t in tasks]

    if args.format == "csv":
        lines = [GAP_HEADER] + [r.to_csv_row(args.timings) for r in reports]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write("\n".join(r.to_text(args.timings) for r in reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_bench(args):
    try:
        data = json.loads(_read(args.config))
        config = RatioConfig.from_dict(data)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise UsageError(f"bad config {args.config}: {exc}") from None
    rows, summary = empirical_ratios(config, args.seed, args.jobs)
    _emit(ratio_csv(rows), args.out)
    failed = False
    for (family, K, objective), agg in summary.items():
        _diag(
            f"{family} K={K} {objective}: {agg['trials']} trials, {agg['refused']} refused, "
            f"max ratio {agg['max']:.4f}, mean {agg['mean']:.4f}, violations {agg['violations']}"
        )
        failed |= agg["violations"] > 0
    return EXIT_FAILED if failed else EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustnet", description="Robust network optimization toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="build an instance from a 3-CNF formula, or a tree from a path")
    p.add_argument("--cnf")
    p.add_argument("--family", choices=("path", "cut"))
    p.add_argument("--levels", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="faithful")
    p.add_argument("--max-entries", type=int, default=2_000_000)
    p.add_argument("--out")
    p.add_argument("--to-tree", action="store_true")
    p.add_argument("--instance")
    p.add_argument("--solution")
    p.add_argument("--solution-out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--objective", choices=("minmax", "regret", "mean"), default="minmax")
    p.add_argument("--method", choices=("auto", "brute", "dp"), default="auto")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="certify the SAT/UNSAT gap or the regret identity")
    p.add_argument("--cnf", nargs="+")
    p.add_argument("--family", nargs="+", choices=("path", "cut"))
    p.add_argument("--levels", nargs="+", type=int, default=[0])
    p.add_argument("--mode", choices=MODES, default="faithful")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds (breaks byte-identical output)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--regret-identity", action="store_true")
    p.add_argument("--instance")
    p.add_argument("--method", choices=("auto", "brute", "dp"), default="auto")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="heuristic vs exact ratios on seeded random instances")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        levels = getattr(args, "levels", None) or []
        if any(t < 0 for t in (levels if isinstance(levels, list) else [levels])):
            raise UsageError("--levels must be nonnegative")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        return args.func(args)
    except UsageError as exc:
        _diag(f"robustnet: error: {exc}")
        return EXIT_USAGE
    except (FormatError, InvalidInstanceError) as exc:
        _diag(f"robustnet: input error: {exc}")
        return EXIT_USAGE
    except (SizeLimitError, InfeasibleError) as exc:
        _diag(f"robustnet: refused: {exc}")
        return EXIT_REFUSED
    except ValueError as exc:
        _diag(f"robustnet: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
