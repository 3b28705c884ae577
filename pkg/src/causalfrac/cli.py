"""Command-line interface.

Exit codes: 0 success, 1 validation or causality failure, 2 solver or
budget failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time

from . import __version__
from .distributions import is_causal_distribution
from .errors import BudgetExceededError, CausalFracError, SolverError
from .fractions import fraction_report
from .functions import DEFAULT_BUDGET, count_causal, enumerate_causal, function_at
from .joint import SpaceSpec, joint_unindex
from .lp import METHODS
from .quantum import VARIANTS, interleaved_order
from .scenario import BUILTINS, ScenarioError, load_order, load_scenario, scenario_from_doc
from .sweep import QUANTITIES, SweepConfig, run_sweep, write_outputs

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", metavar="PATH", help="scenario JSON file")
    src.add_argument("--builtin", choices=BUILTINS, help="built-in scenario")
    p.add_argument("--gamma0", type=float, default=0.0, help="first measurement angle (interleaved-bell)")
    p.add_argument("--gamma1", type=float, default=math.pi / 2, help="second measurement angle (interleaved-bell)")
    p.add_argument("--variant", choices=VARIANTS, default="base", help="causal order of the interleaved tests")
    p.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    p.add_argument("--order-file", metavar="PATH", help="judge the table against this order instead")
    p.add_argument("--tol", type=float, help="validation tolerance for probability tables")
    p.add_argument("--renormalize", action="store_true", help="rescale table rows to sum to one")


def _load(args):
    if args.scenario:
        sc = load_scenario(args.scenario, degrees=args.degrees, tol=args.tol, renormalize=args.renormalize)
    else:
        doc = {"builtin": args.builtin, "gamma0": args.gamma0, "gamma1": args.gamma1, "variant": args.variant}
        sc = scenario_from_doc(doc, degrees=args.degrees)
    d = sc.distribution
    if args.tol is not None and not args.scenario:
        d = type(d)(d.order, d.spec, d.table, tol=args.tol)
    if args.order_file:
        order = load_order(args.order_file)
        if order.labels != d.order.labels:
            raise ScenarioError(f"{args.order_file}: events {list(order.labels)} do not match {list(d.order.labels)}")
        d = d.with_order(order)
    return sc.name, d


def _assignment_str(order, cards, index) -> str:
    a = joint_unindex(cards, range(order.n), index)
    return " ".join(f"{order.labels[k]}={v}" for k, v in a.as_dict().items())


def cmd_check(args) -> int:
    name, d = _load(args)
    rep = is_causal_distribution(d)
    print(f"scenario: {name}")
    print(f"order: {d.order.covers() or 'discrete'}")
    print(f"causal: {'yes' if rep.causal else 'no'}")
    print(f"max_deviation: {rep.deviation:.6e}")
    if not rep.causal:
        v = rep.violation
        print(f"violating_lowerset: {{{', '.join(d.order.labels[k] for k in v.lowerset.members)}}}")
        i, j = v.pair
        print(f"violating_inputs: [{_assignment_str(d.order, d.spec.inputs, i)}] vs [{_assignment_str(d.order, d.spec.inputs, j)}]")
        return EXIT_INVALID
    return EXIT_OK


def _witness_doc(order, spec, witness):
    return [
        {"index": k, "weight": w, "tables": [list(t) for t in function_at(order, spec, k).tables]}
        for k, w in sorted(witness.items(), key=lambda kv: -kv[1])
    ]


def cmd_fractions(args) -> int:
    name, d = _load(args)
    rep = is_causal_distribution(d)
    if not rep.causal:
        print(f"error: distribution is not causal for the order (deviation {rep.deviation:.3e})", file=sys.stderr)
        return EXIT_INVALID
    t0 = time.perf_counter()
    report = fraction_report(d, budget=args.budget, method=args.method)
    print(f"scenario: {name}")
    for k, v in report.as_record().items():
        print(f"{k}: {v:.12f}")
    for k, v in report.diagnostics.items():
        print(f"{k}: {v:.6g}" if isinstance(v, float) else f"{k}: {v}")
    print(f"total_seconds: {time.perf_counter() - t0:.3f}")
    if args.witness:
        doc = {"events": list(d.order.labels), "functions": _witness_doc(d.order, d.spec, report.witness)}
        if args.witness == "-":
            print(json.dumps(doc))
        else:
            with open(args.witness, "w") as fh:
                json.dump(doc, fh, indent=1)
    return EXIT_OK


def cmd_sweep(args) -> int:
    quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
    config = SweepConfig(args.resolution, args.variant, quantities, args.method, args.budget, args.workers)
    t0 = time.perf_counter()
    rows = run_sweep(config)
    paths = write_outputs(rows, config, args.out, args.scale)
    failed = sum(1 for r in rows if any(math.isnan(r[q]) for q in quantities))
    for p in paths:
        print(p)
    print(f"cells: {len(rows)}  failed: {failed}  seconds: {time.perf_counter() - t0:.1f}")
    return EXIT_SOLVER if failed else EXIT_OK


def _parse_cards(text: str, n: int, what: str) -> tuple[int, ...]:
    vals = [int(x) for x in text.split(",")]
    if len(vals) == 1:
        vals = vals * n
    if len(vals) != n:
        raise ScenarioError(f"--{what}: expected 1 or {n} values")
    return tuple(vals)


def cmd_enumerate(args) -> int:
    order = load_order(args.order_file) if args.order_file else interleaved_order(args.variant)
    spec = SpaceSpec(_parse_cards(args.inputs, order.n, "inputs"), _parse_cards(args.outputs, order.n, "outputs"))
    print(f"events: {list(order.labels)}")
    print(f"order: {order.covers() or 'discrete'}")
    print(f"count: {count_causal(order, spec)}")
    if args.list:
        for k, f in enumerate(enumerate_causal(order, spec, budget=args.budget)):
            print(json.dumps({"index": k, "tables": [list(t) for t in f.tables]}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalfrac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="test a distribution for causality against its order")
    _add_scenario_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fractions", help="local, no-signalling local and no-signalling fractions")
    _add_scenario_args(p)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum number of causal functions")
    p.add_argument("--method", choices=METHODS, default="simplex")
    p.add_argument("--witness", metavar="PATH", help="write the local witness as JSON ('-' for stdout)")
    p.set_defaults(func=cmd_fractions)

    p = sub.add_parser("sweep", help="interleaved-bell grid over [0, pi]^2 to CSV and heatmaps")
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--variant", choices=VARIANTS, default="base")
    p.add_argument("--quantities", default=",".join(QUANTITIES), help=f"comma list from {QUANTITIES}")
    p.add_argument("--out", default="sweep-out", metavar="DIR")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $CAUSALFRAC_WORKERS or all cores)")
    p.add_argument("--scale", type=int, default=4, help="heatmap pixels per grid cell")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--method", choices=METHODS, default="simplex")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("enumerate", help="count (or list) causal functions of an order")
    p.add_argument("--variant", choices=VARIANTS, default="base", help="interleaved order when no --order-file")
    p.add_argument("--order-file", metavar="PATH")
    p.add_argument("--inputs", default="2", help="input cardinality, one value or one per event")
    p.add_argument("--outputs", default="2", help="output cardinality, one value or one per event")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--list", action="store_true", help="stream every function's behaviour tables")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (BudgetExceededError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (CausalFracError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
