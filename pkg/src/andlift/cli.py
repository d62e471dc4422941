"""Command-line front end.

Subcommands: measures, tree, protocol, rank, zoo, dichotomy, verify.
Function and set-system files use the formats documented in poly / optkern.
Exit codes: 0 success, 1 parse error or failed verification, 2 capacity
guard, 3 internal assertion.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__, comm, harness, measures, trees, zoo
from .errors import CapacityError, FormatError
from .poly import (
    BitVec,
    MultilinearPoly,
    TruthTable,
    format_poly,
    format_table,
    load_poly,
    mobius_invert,
    parse_function,
    to_table,
)
from .optkern import parse_set_system
from .report import (
    format_measure_report,
    frac_to_str,
    measure_report_to_json,
)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_poly_arg(path: str) -> MultilinearPoly:
    return load_poly(_read(path))


def cmd_measures(args) -> int:
    f = _load_poly_arg(args.file)
    if args.as_global:
        rep = measures.global_measures(f)
    else:
        point = BitVec(f.n, args.point)
        rep = measures.local_measures(f, point)
    if args.json:
        print(json.dumps(measure_report_to_json(rep), indent=2))
    else:
        print(format_measure_report(rep))
    return 0


def cmd_tree(args) -> int:
    f = _load_poly_arg(args.file)
    tree = trees.build_zero_dt(f)
    zd = trees.dt_zero_depth(tree)
    if args.kind == "zero":
        payload = {
            "kind": "zero",
            "zero_depth": zd,
            "depth": trees.dt_depth(tree),
            "tree": trees.format_dt(tree),
        }
    else:
        adt = trees.zero_dt_to_adt(tree, f.n)
        payload = {
            "kind": "and",
            "zero_depth": zd,
            "depth": trees.adt_depth(adt),
            "depth_bound": zd * trees.ceil_log2(f.n + 1),
            "tree": trees.format_adt(adt),
        }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
    return 0


def cmd_protocol(args) -> int:
    f = _load_poly_arg(args.file)
    adt, rep = comm.logrank_pipeline(f, seed=args.seed)
    payload = {
        "adt_depth": rep.adt_depth,
        "protocol_cost_max": rep.protocol_cost,
        "protocol_cost_bound": rep.protocol_cost_bound,
        "pairs_checked": rep.protocol_pairs_checked,
        "exhaustive": rep.protocol_exhaustive,
        "zero_depth": rep.zero_depth,
        "spar": rep.spar,
        "rank": rep.rank,
        "mbs": rep.measures.mbs,
        "fmbs": frac_to_str(rep.measures.fmbs),
        "hsc": rep.measures.hsc,
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")
        if args.trace is not None:
            x, y = args.trace
            tr = comm.simulate_protocol(adt, BitVec(f.n, x), BitVec(f.n, y))
            print(f"transcript({x},{y}): {tr} -> {tr.output}")
    return 0


def cmd_rank(args) -> int:
    f = _load_poly_arg(args.file)
    rank = comm.comm_rank(f)
    if args.json:
        print(json.dumps({"rank": rank, "spar": f.spar}))
    else:
        print(rank)
    return 0


def cmd_zoo(args) -> int:
    f = zoo.generate(zoo.FamilySpec(args.family, args.param))
    if args.emit == "table":
        print(format_table(to_table(f)), end="")
    else:
        print(format_poly(f), end="")
    return 0


def cmd_dichotomy(args) -> int:
    system = parse_set_system(_read(args.file))
    res = zoo.dichotomy(system, args.m)
    if args.json:
        payload = {
            "kind": res.kind,
            "mbs": res.mbs,
        }
        if res.kind == "hitting":
            payload["hitting_set"] = list(res.hitting_set.indices())
            payload["greedy_steps"] = [
                {"index": s.index, "remaining": s.remaining}
                for s in res.greedy_steps
            ]
        else:
            payload["T"] = res.t_mask.mask
            payload["disjoint_sets"] = [b.mask for b in res.disjoint_sets]
        print(json.dumps(payload, indent=2))
    else:
        print(f"branch: {res.kind} (global MBS of the family polynomial: {res.mbs})")
        if res.kind == "hitting":
            print(f"hitting set: {{{','.join(map(str, res.hitting_set.indices()))}}}")
            for s in res.greedy_steps:
                print(f"  picked {s.index}, {s.remaining} sets remaining")
        else:
            print(f"T = {res.t_mask}")
            for b in res.disjoint_sets:
                print(f"  disjoint: {b}")
    return 0


def cmd_verify(args) -> int:
    rep = harness.run_suite(
        max_n=args.max_n,
        exhaustive=args.exhaustive,
        samples=args.samples,
        seed=args.seed,
        progress=(lambda msg: print(f"... {msg}", file=sys.stderr))
        if not args.json
        else None,
    )
    if args.json:
        print(json.dumps(rep.to_json(), indent=2))
    else:
        print(rep.format_text())
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="andlift",
        description="Exact complexity measures, AND-decision trees and "
        "communication pipelines for boolean functions.",
    )
    parser.add_argument("--version", action="version", version=f"andlift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measures", help="MBS/FMBS/FHSC/HSC at a point or globally")
    p.add_argument("file", help="function file ('-' for stdin)")
    p.add_argument("--point", type=int, default=0,
                   help="point as a little-endian index (default 0 = all zeros)")
    p.add_argument("--global", dest="as_global", action="store_true",
                   help="maximize each measure over all points")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("tree", help="build a zero-DT or its AND-decision tree")
    p.add_argument("file")
    p.add_argument("kind", choices=["zero", "and"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("protocol", help="simulate the two-party protocol of the ADT")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", type=int, nargs=2, metavar=("X", "Y"),
                   help="also print the transcript for one input pair")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("rank", help="exact rank of the communication matrix")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("zoo", help="emit a named example family as a function file")
    p.add_argument("family", choices=list(zoo.FAMILIES))
    p.add_argument("param", type=int)
    p.add_argument("--emit", choices=["poly", "table"], default="poly")
    p.set_defaults(func=cmd_zoo)

    p = sub.add_parser("dichotomy", help="hitting set or disjoint residual sets")
    p.add_argument("file", help="set-system file")
    p.add_argument("m", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dichotomy)

    p = sub.add_parser("verify", help="run the full inequality suite")
    p.add_argument("--max-n", type=int, default=3, dest="max_n")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", default=True)
    mode.add_argument("--sampled", dest="exhaustive", action="store_false")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
