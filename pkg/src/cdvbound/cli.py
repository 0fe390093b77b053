"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad input or unmet precondition.
Maps are read from files in the text map format, or from bundled examples
written as ``builtin:<name>``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import maps
from .filling import isometric_filling, verify_isometric
from .homotopy import edgewidth, edgewidth_bruteforce
from .nodal import heawood_number
from .pipeline import KNOWN_MU, check_bound, run_pipeline
from .refine import PreconditionError, build_prescribed_edgewidth
from .spectral import SchrodingerOperator, kernel_exact, parse_operator, validate_operator
from .surface_map import MapError, classify_surface, format_map, parse_map

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load_map(spec: str):
    if spec.startswith("builtin:"):
        try:
            return maps.load(spec.split(":", 1)[1])
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    try:
        return parse_map(Path(spec).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror}") from None


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    raise TypeError(type(x).__name__)


def _write_json(path: str, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n")


def cmd_fill(args) -> int:
    if args.n < 3:
        raise InputError("n must be at least 3")
    disk = isometric_filling(args.n, args.seed)
    ok = verify_isometric(disk)
    m = disk.to_map()
    Path(args.out).write_text(format_map(m, f"isometric filling of a {args.n}-cycle, seed {args.seed}"))
    print(f"fill n={args.n}: V={m.num_vertices} E={m.num_edges} F={len(m.faces())} isometric={ok}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_refine(args) -> int:
    G = _load_map(args.input)
    ref = build_prescribed_edgewidth(G, args.k, face=args.face, seed=args.seed)
    Path(args.out).write_text(format_map(ref.H, f"refined with k={args.k} in face {args.face}, seed {args.seed}"))
    if args.model:
        _write_json(args.model, ref.model.to_json())
    info = classify_surface(ref.H)
    print(f"refine: V={ref.H.num_vertices} E={ref.H.num_edges} F={len(ref.H.faces())} {info.name}, edgewidth {args.k}")
    return EXIT_OK


def cmd_edgewidth(args) -> int:
    m = _load_map(args.input)
    ew = edgewidth(m)
    print(f"edgewidth: {ew}")
    if args.brute_force is not None:
        bf = edgewidth_bruteforce(m, args.brute_force)
        shown = bf if bf is not None else f"> {args.brute_force}"
        print(f"brute force (cycles up to {args.brute_force}): {shown}")
        expected = ew if ew <= args.brute_force else None
        if bf != expected:
            return EXIT_FAIL
    return EXIT_OK


def cmd_kernel(args) -> int:
    m = _load_map(args.graph)
    try:
        matrix = parse_operator(Path(args.operator).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {args.operator}: {exc.strerror}") from None
    L = SchrodingerOperator.on_map(m, matrix)
    if not validate_operator(L):
        raise InputError("operator does not match the graph's sign pattern")
    basis = kernel_exact(L)
    print(f"corank: {basis.corank}")
    for vec in basis.vectors:
        print(" ".join(str(x) for x in vec))
    return EXIT_OK


def cmd_analyze(args) -> int:
    G = _load_map(args.input)
    operator = None
    seed = args.seed
    if args.operator.startswith("designed"):
        if ":" in args.operator:
            seed = int(args.operator.split(":", 1)[1])
    else:
        try:
            operator = parse_operator(Path(args.operator).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.operator}: {exc.strerror}") from None
    result = run_pipeline(G, args.k, face=args.face, operator=operator, seed=seed)
    data = result.to_json()
    data["input"] = {"map": args.input, "face": args.face, "k": args.k, "operator": args.operator, "seed": seed}
    if args.report:
        _write_json(args.report, data)
    if args.dot and result.report is not None:
        from .nodal import blowup, build_zero_complex, contract_2d

        H = result.refined.H_prime
        Zb = blowup(build_zero_complex(H, result.vector), H)
        Path(args.dot).write_text(contract_2d(Zb, result.refined.disk_faces).to_dot())
    for msg in result.messages:
        print(msg)
    if result.report is not None:
        for c in result.report.checks:
            print(f"{'PASS' if c.holds else 'FAIL'} {c.name}: {c.lhs} vs {c.rhs}")
    print(f"exit {result.exit_code}")
    return result.exit_code


def cmd_check_bound(args) -> int:
    if args.graph:
        if args.graph not in KNOWN_MU:
            raise InputError(f"no known mu for {args.graph}; known: {', '.join(KNOWN_MU)}")
        mu = KNOWN_MU[args.graph].mu
    elif args.mu is not None:
        mu = args.mu
    else:
        raise InputError("give --mu or --graph")
    if args.chi > 2:
        raise InputError("Euler characteristic of a closed surface is at most 2")
    ok, slack = check_bound(mu, args.chi)
    print(f"mu={mu} chi={args.chi}: bound {7 - 2 * args.chi}, slack {slack}, {'holds' if ok else 'violated'}")
    print(f"Heawood number for chi={args.chi}: {heawood_number(args.chi)}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdvbound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fill", help="isometric filling of an n-cycle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_fill)

    s = sub.add_parser("refine", help="triangulation with prescribed edgewidth")
    s.add_argument("--input", required=True)
    s.add_argument("--face", type=int, default=0)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--model")
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("edgewidth", help="shortest non-contractible cycle length")
    s.add_argument("--input", required=True)
    s.add_argument("--brute-force", type=int, metavar="MAX")
    s.set_defaults(func=cmd_edgewidth)

    s = sub.add_parser("kernel", help="exact kernel of an operator")
    s.add_argument("--graph", required=True)
    s.add_argument("--operator", required=True)
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("analyze", help="full refine, spectral and nodal run")
    s.add_argument("--input", required=True)
    s.add_argument("--face", type=int, default=0)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--operator", default="designed", help="operator file, or designed[:seed]")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--report")
    s.add_argument("--dot")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("check-bound", help="compare mu with 7 - 2 chi")
    s.add_argument("--mu", type=int)
    s.add_argument("--graph", help="name in the known-mu table, e.g. K7")
    s.add_argument("--chi", type=int, required=True)
    s.set_defaults(func=cmd_check_bound)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MapError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
