"""Command-line entry point: ``fractalsep {generate,render,cut,paths,experiment}``.

Exit codes: 0 success, 1 invariant violation, 2 invalid input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .export import header_dict, render_svg, write_graph
from .fractal_core import (
    DEFAULT_MAX_VERTICES,
    BudgetExceeded,
    FractalParams,
    build_complete_lines_subgraph,
    build_level_graph,
    vertex_count_formula,
)
from .separation import (
    build_canonical_paths,
    constructive_cut,
    cut_epsilon_exact,
    path_lower_bound,
)

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _digit_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--A expects a comma list of digits, got {text!r}")


def _add_params(p: argparse.ArgumentParser, k_default: int | None = 2) -> None:
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--b", type=int, default=3)
    p.add_argument("--A", type=_digit_list, default=(1,), help="comma list, e.g. 1,3 (empty for none)")
    p.add_argument("--m", type=int, default=1)
    if k_default is not None:
        p.add_argument("--k", type=int, default=k_default)
    p.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)


def _add_output(p: argparse.ArgumentParser, formats: list[str], default: str) -> None:
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractalsep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build Gamma_k or C_k and export it")
    _add_params(g)
    g.add_argument("--graph", choices=["level", "complete"], default="level")
    _add_output(g, ["edgelist", "json"], "edgelist")

    r = sub.add_parser("render", help="SVG picture of a 2-D level graph")
    _add_params(r)
    r.add_argument("--highlight-complete", action="store_true")
    r.add_argument("--scale", type=int, default=8)
    _add_output(r, ["svg"], "svg")

    c = sub.add_parser("cut", help="balanced cutset (constructive, or exact with --exact)")
    _add_params(c)
    c.add_argument("--graph", choices=["level", "complete"], default="complete")
    c.add_argument("--epsilon", type=float, default=0.5)
    c.add_argument("--exact", action="store_true")
    c.add_argument("--bb-node-limit", type=int, default=2_000_000)
    c.add_argument("--time-limit", type=float, default=None)
    _add_output(c, ["json", "csv"], "json")

    pa = sub.add_parser("paths", help="canonical path congestion on C_k (m = 1)")
    _add_params(pa)
    pa.add_argument("--max-pairs", type=int, default=10_000_000)
    _add_output(pa, ["json"], "json")

    e = sub.add_parser("experiment", help="run a verification suite")
    _add_params(e, k_default=None)
    e.add_argument("--suite", choices=["carpet-sandwich", "sandwich", "counts", "oracle"], required=True)
    e.add_argument("--k-min", type=int, default=1)
    e.add_argument("--k-max", type=int, default=None)
    e.add_argument("--epsilon", type=float, default=0.5)
    e.add_argument("--graph", choices=["level", "complete"], default="complete")
    e.add_argument("--bb-node-limit", type=int, default=200_000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--samples", type=int, default=200)
    _add_output(e, ["json", "csv"], "json")
    return parser


def _params(args) -> FractalParams:
    return FractalParams(args.d, args.b, args.A, args.m)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _graph(args, params):
    build = build_level_graph if getattr(args, "graph", "level") == "level" else build_complete_lines_subgraph
    return build(params, args.k, max_vertices=args.max_vertices)


def cmd_generate(args) -> int:
    params = _params(args)
    g = _graph(args, params)
    print(f"{params.label} {g.name}: n={g.n} edges={len(g.edges)}")
    status = EXIT_OK
    if args.graph == "level":
        formula = vertex_count_formula(params, args.k)
        match = formula == g.n
        print(f"formula M^k = {formula} ({'match' if match else 'MISMATCH'})")
        status = EXIT_OK if match else EXIT_INVARIANT
    if args.out is not None:
        if args.format == "json":
            _emit(json.dumps(header_dict(g), sort_keys=True), args.out)
        else:
            edges, header = write_graph(g, args.out)
            print(f"wrote {edges} and {header}")
    return status


def cmd_render(args) -> int:
    params = _params(args)
    g = build_level_graph(params, args.k, max_vertices=args.max_vertices)
    hl = build_complete_lines_subgraph(params, args.k, max_vertices=args.max_vertices) if args.highlight_complete else None
    _emit(render_svg(g, hl, scale=args.scale), args.out)
    return EXIT_OK


def cmd_cut(args) -> int:
    params = _params(args)
    g = _graph(args, params)
    upper = constructive_cut(g, args.epsilon) if args.epsilon >= 0.5 else None
    if args.exact:
        res = cut_epsilon_exact(
            g, args.epsilon, node_limit=args.bb_node_limit, time_limit=args.time_limit, incumbent=upper
        )
    elif upper is None:
        raise ValueError("the constructive cutter needs epsilon >= 1/2; use --exact")
    else:
        res = upper
    if args.format == "csv":
        d = res.to_dict()
        text = "epsilon,cut_size,largest_component,proved_optimal\n"
        text += f"{d['epsilon']},{d['cut_size']},{d['largest_component']},{d['proved_optimal']}\n"
    else:
        text = res.to_json()
    _emit(text, args.out)
    return EXIT_OK if res.valid else EXIT_INVARIANT


def cmd_paths(args) -> int:
    params = _params(args)
    c = build_complete_lines_subgraph(params, args.k, max_vertices=args.max_vertices)
    ps = build_canonical_paths(c, max_pairs=args.max_pairs)
    pb = path_lower_bound(ps)
    out = ps.summary(pb.value)
    out["raw_bound"] = pb.raw
    out["certified"] = pb.certified
    _emit(json.dumps(out, sort_keys=True), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    params = _params(args)
    if args.suite == "oracle":
        bad = experiments.oracle_check(args.samples, seed=args.seed)
        _emit(json.dumps({"samples": args.samples, "seed": args.seed, "discrepancies": bad}, sort_keys=True), args.out)
        return EXIT_OK if not bad else EXIT_INVARIANT
    if args.suite == "counts":
        report = experiments.count_report(params, args.k_max if args.k_max is not None else 3, max_vertices=args.max_vertices)
    else:
        if args.suite == "carpet-sandwich":
            params = experiments.CARPET
        k_max = args.k_max if args.k_max is not None else 6
        report = experiments.build_report(
            params,
            range(args.k_min, k_max + 1),
            args.epsilon,
            suite=args.suite,
            kind=args.graph,
            node_limit=args.bb_node_limit,
            max_vertices=args.max_vertices,
        )
    _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    print(f"digest {report.digest()}", file=sys.stderr)
    for name, fit in report.fits.items():
        print(f"fit {name}: slope {fit.slope:.5f} (target E {report.target_E:.5f})", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_INVARIANT


COMMANDS = {
    "generate": cmd_generate,
    "render": cmd_render,
    "cut": cmd_cut,
    "paths": cmd_paths,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
