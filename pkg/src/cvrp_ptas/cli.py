"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 invalid input or solution, 4 budget
exceeded, 5 embedding or pipeline contract violated.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .banding import BandParams, distinct_partitions, make_partition
from .baseline import bound_report, itp_baseline, radial_lower_bound
from .dp import solve_dp
from .embedding import EMBEDDERS, assemble_host, check_embedding, extract_band_subgraph
from .errors import BudgetExceeded, ContractViolation, ParseError, ValidationError
from .generators import FAMILIES, GeneratorSpec, generate
from .graph import read_instance, reduce_demands, shortest_paths, to_document
from .oracle import solve_oracle
from .pipeline import PtasConfig, run_derandomized, run_randomized
from .report import emit_report
from .solution import Solution, check_solution, collapse_satellites, solution_validate
from .treedecomp import decompose, validate

EXIT_VALIDATION = 3
EXIT_BUDGET = 4
EXIT_CONTRACT = 5


def _emit(args, doc):
    print(emit_report(doc, args.format))


def _shift(args) -> float:
    return args.x if args.x is not None else random.Random(args.seed).random()


def cmd_gen(args):
    size = tuple(args.size)
    spec = GeneratorSpec(args.family, size, tuple(args.weights), args.density, args.capacity,
                         args.seed, args.depot)
    text = json.dumps(generate(spec), sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def cmd_bands(args):
    inst = read_instance(args.instance)
    metric = shortest_paths(inst)
    if args.all:
        cands = distinct_partitions(inst, metric, args.epsilon)
        _emit(args, {"epsilon": args.epsilon, "candidates": len(cands),
                     "partitions": [{"x": x, "bands": _band_rows(p)} for x, p in cands]})
        return
    params = BandParams(args.epsilon, _shift(args))
    part = make_partition(inst, metric, params)
    _emit(args, {"epsilon": params.epsilon, "x": params.x, "base": params.base,
                 "bands": _band_rows(part)})


def _band_rows(part) -> list[dict]:
    rows = []
    for i, band in enumerate(part.bands):
        lower = 0.0 if i == 0 else part.params.boundary(i - 1)
        rows.append({"index": i, "lower": lower, "upper": part.params.boundary(i),
                     "count": len(band), "vertices": band})
    return rows


def cmd_embed(args):
    inst = read_instance(args.instance)
    metric = shortest_paths(inst)
    params = BandParams(args.epsilon, _shift(args))
    part = make_partition(inst, metric, params)
    host = assemble_host(inst, metric, part, EMBEDDERS[args.embedder])
    checks = {}
    for i, band in enumerate(part.bands):
        if [v for v in band if v != inst.depot]:
            sub = extract_band_subgraph(inst, metric, part, i)
            emb = EMBEDDERS[args.embedder](sub, host.eps_prime, inst.depot)
            rep = check_embedding(sub, emb, host.eps_prime, inst.depot, seed=args.seed)
            checks[str(i)] = {"pairs": rep.pairs_checked, "contractions": len(rep.contractions),
                              "additive_excess": len(rep.additive_excess)}
    _emit(args, {"x": params.x, "epsilon": params.epsilon, "eps_prime": host.eps_prime,
                 "host_vertices": host.instance.n, "host_edges": len(host.instance.edges),
                 "band_treewidths": {str(k): v for k, v in host.band_treewidths.items()},
                 "treewidth_report": host.treewidth_report, "host": to_document(host.instance),
                 "phi": list(host.phi), "provenance": list(host.provenance), "checks": checks})


def cmd_treedecomp(args):
    inst = read_instance(args.instance)
    edges = [(u, v) for u, v, _ in inst.edges]
    td = decompose(range(inst.n), edges, root_vertex=inst.depot)
    problems = validate(td, range(inst.n), edges)
    _emit(args, {"width": td.width, "root": td.root, "bags": [sorted(b) for b in td.bags],
                 "tree_edges": [list(e) for e in td.edges], "valid": not problems,
                 "violations": [str(p) for p in problems]})
    if problems:
        raise ValidationError("tree-decomposition", str(problems[0]))


def _solve_unit(inst, solver):
    """Run a unit-demand solver, splitting larger demands and merging them back."""
    reduced = reduce_demands(inst)
    sol = solver(reduced)
    return sol if reduced is inst else collapse_satellites(sol, reduced, inst)


def cmd_solve(args):
    inst = read_instance(args.instance)
    metric = shortest_paths(inst)
    doc: dict = {"instance": inst.name, "scale": inst.scale}
    if args.oracle:
        sol = solve_oracle(inst, metric)
        doc["solver"] = "oracle"
    elif args.baseline:
        sol = itp_baseline(inst, metric, args.tsp)
        doc["solver"] = "baseline"
    elif args.exact_tw:
        sol = _solve_unit(inst, solve_dp)
        doc["solver"] = "exact-tw"
    else:
        config = PtasConfig.for_instance(inst, args.epsilon, seed=args.seed, embedder=args.embedder,
                                         mode="derandomized" if args.derandomize else "randomized",
                                         oracle=False)
        runner = run_derandomized if args.derandomize else run_randomized
        holder = {}

        def ptas(unit):
            s, rep = runner(unit, config)
            holder["report"] = rep
            return s
        sol = _solve_unit(inst, ptas)
        doc["solver"] = "ptas"
        doc["report"] = holder["report"]
    check_solution(sol, inst)
    doc["lower_bound"] = radial_lower_bound(inst, metric)
    doc["solution"] = sol
    if args.out:
        Path(args.out).write_text(json.dumps(sol.to_dict(), sort_keys=True) + "\n")
    _emit(args, doc)


def cmd_verify(args):
    inst = read_instance(args.instance)
    try:
        sol = Solution.from_dict(json.loads(Path(args.solution).read_text()))
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read solution: {exc}") from exc
    problems = solution_validate(sol, inst)
    _emit(args, {"valid": not problems, "cost": sol.cost, "violations": [str(p) for p in problems]})
    if problems:
        raise ValidationError(problems[0].kind, str(problems[0]))


def cmd_report(args):
    if args.json:
        args.format = "json"
    inst = reduce_demands(read_instance(args.instance))
    metric = shortest_paths(inst)
    config = PtasConfig.for_instance(inst, args.epsilon, seed=args.seed, embedder=args.embedder,
                                     mode="derandomized" if args.derandomize else "randomized")
    runner = run_derandomized if args.derandomize else run_randomized
    _, rep = runner(inst, config, metric)
    bounds = bound_report(inst, metric, rep.lifted_cost)
    doc = {"run": rep.to_dict(include_timings=args.timings), "bounds": bounds}
    _emit(args, doc)


GLOBAL_DEFAULTS = {"seed": 0, "epsilon": 0.5, "format": "table"}


def _global_flags(parser, default):
    parser.add_argument("--seed", type=int, default=default("seed"), help="seed for shifts and generators")
    parser.add_argument("--epsilon", type=float, default=default("epsilon"),
                        help="target accuracy (for bands/embed: the band parameter itself)")
    parser.add_argument("--format", choices=("table", "json"), default=default("format"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvrp-ptas",
                                description="Banded-embedding approximation for capacitated vehicle routing.")
    _global_flags(p, GLOBAL_DEFAULTS.get)
    # the same flags after the subcommand; SUPPRESS keeps them from clobbering earlier values
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, lambda _: argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance document")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--size", type=int, nargs="+", required=True, help="rows cols for grid, n otherwise")
    g.add_argument("--weights", type=int, nargs=2, default=(1, 1), metavar=("LO", "HI"))
    g.add_argument("--density", type=float, default=1.0, help="client probability per vertex")
    g.add_argument("--capacity", type=int, default=2)
    g.add_argument("--depot", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bands", parents=[common], help="band partition for one shift, or all distinct partitions")
    b.add_argument("instance")
    b.add_argument("--x", type=float, help="shift in [0, 1] (default: drawn from --seed)")
    b.add_argument("--all", action="store_true", help="list every distinct partition")
    b.set_defaults(func=cmd_bands)

    e = sub.add_parser("embed", parents=[common], help="assemble the host graph for one shift")
    e.add_argument("instance")
    e.add_argument("--x", type=float)
    e.add_argument("--embedder", choices=sorted(EMBEDDERS), default="exact")
    e.set_defaults(func=cmd_embed)

    t = sub.add_parser("treedecomp", parents=[common], help="min-fill tree decomposition of the instance graph")
    t.add_argument("instance")
    t.set_defaults(func=cmd_treedecomp)

    s = sub.add_parser("solve", parents=[common], help="solve an instance")
    s.add_argument("instance")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--oracle", action="store_true", help="brute force (small instances)")
    mode.add_argument("--baseline", action="store_true", help="iterated tour partitioning")
    mode.add_argument("--exact-tw", action="store_true", help="exact tree-decomposition DP")
    mode.add_argument("--ptas", action="store_true", help="banded embedding pipeline")
    s.add_argument("--derandomize", action="store_true", help="try every distinct partition (with --ptas)")
    s.add_argument("--embedder", choices=sorted(EMBEDDERS), default="exact")
    s.add_argument("--tsp", choices=("auto", "exact", "heuristic"), default="auto")
    s.add_argument("--out", help="also write the solution document here")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check a solution document against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", parents=[common], help="run the pipeline and print its report with bounds")
    r.add_argument("instance")
    r.add_argument("--json", action="store_true")
    r.add_argument("--derandomize", action="store_true")
    r.add_argument("--embedder", choices=sorted(EMBEDDERS), default="exact")
    r.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identical output)")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
