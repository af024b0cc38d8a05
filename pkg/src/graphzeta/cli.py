"""Command-line front door.

Exit codes: 1 usage or I/O, 2 validation, 3 budget, 4 failed identity.
Errors print a single line ``error: <kind>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import fields
from .covers import (
    compose_covers,
    cover_to_json,
    homology_tower,
    parse_group,
    random_cover,
    random_group_cover,
    trivial_cover,
)
from .errors import GraphZetaError, ValidationError
from .geodesics import euler_product_log_series, geodesic_lines
from .graph import GENERAL, REGULAR, girth, load_graph
from .l2det import (
    convergence_experiment,
    gamma_heat_trace,
    l2det_closed,
    lambda_of_u,
)
from .local_system import load_local_system, trivial_local_system
from .zeta import METHODS, verify_main_theorem, zeta


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"not an integer: {text!r}") from None
    if value < 0:
        raise UsageError(f"negative value: {text!r}")
    return value


def _read_graph(path: str, mode: str):
    try:
        return load_graph(path, mode)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_system(args, g):
    if not getattr(args, "local_system", None):
        return trivial_local_system(g)
    try:
        return load_local_system(args.local_system, g)
    except OSError as exc:
        raise UsageError(f"cannot read {args.local_system}: {exc.strerror}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def cmd_zeta(args) -> int:
    g = _read_graph(args.graph, args.mode)
    ls = _read_system(args, g)
    start = time.perf_counter()
    if args.method == "geodesic":
        if args.max_len is None:
            raise UsageError("--max-len is required for the geodesic method")
        series = euler_product_log_series(ls, args.max_len)
        out = {"method": "geodesic", "kind": "log-series", "order": series.order,
               "coefficients": series.to_json()}
    else:
        poly = zeta(ls, args.method)
        out = {"method": args.method, "kind": "polynomial", "degree": poly.degree,
               "coefficients": poly.to_json()}
    if args.timing:
        out["timing"] = round(time.perf_counter() - start, 6)
    _emit(out)
    return 0


def cmd_geodesics(args) -> int:
    g = _read_graph(args.graph, args.mode)
    ls = _read_system(args, g)
    for line in geodesic_lines(ls, args.max_len):
        _emit(line)
    return 0


def cmd_verify_main(args) -> int:
    g = _read_graph(args.graph, REGULAR)
    ls = _read_system(args, g)
    report = verify_main_theorem(ls)
    _emit(report.to_json())
    return 0 if report.passed else 4


def cmd_cover(args) -> int:
    g = _read_graph(args.graph, args.mode)
    if (args.group is None) == (args.degree is None):
        raise UsageError("give exactly one of --group or --degree")
    if args.seed is None:
        raise UsageError("--seed is required")
    if args.group is not None:
        cover = random_group_cover(g, parse_group(args.group), args.seed)
    else:
        cover = random_cover(g, args.degree, args.seed)
    _emit(cover_to_json(cover))
    return 0


def cmd_tower(args) -> int:
    g = _read_graph(args.graph, args.mode)
    tower = homology_tower(g, args.prime, args.levels, args.index_cap)
    levels = []
    for level, cover in enumerate(tower, start=1):
        levels.append({"level": level, "index": cover.index, "vertices": cover.total.n,
                       "edges": cover.total.m, "girth": girth(cover.total),
                       "graph": cover.total.to_json()})
    _emit({"prime": args.prime, "levels": levels})
    return 0


def _parse_cover_entries(text: str, g, seed):
    entries = [s.strip() for s in text.split(",") if s.strip()]
    if not entries:
        raise UsageError("empty cover list")
    covers = []
    for entry in entries:
        name, _, arg = entry.partition(":")
        if name == "trivial":
            covers.append(trivial_cover(g))
        elif name == "homology":
            try:
                level = int(arg or 1)
            except ValueError:
                raise UsageError(f"bad cover entry {entry!r}") from None
            if level == 0:
                covers.append(trivial_cover(g))
            else:
                covers.append(compose_covers(homology_tower(g, 2, level, 10**6)))
        elif name == "random":
            if seed is None:
                raise UsageError("--seed is required for random covers")
            try:
                degree = int(arg)
            except ValueError:
                raise UsageError(f"bad cover entry {entry!r}") from None
            covers.append(random_cover(g, degree, seed))
        else:
            raise UsageError(f"bad cover entry {entry!r}")
    return covers


def cmd_converge(args) -> int:
    g = _read_graph(args.graph, REGULAR)
    covers = _parse_cover_entries(args.covers, g, args.seed)
    report = convergence_experiment(g, covers, args.u)
    sys.stdout.write(report.to_csv())
    return 0


def cmd_l2det(args) -> int:
    value = l2det_closed(args.q, args.n, args.r, args.u)
    out = {"q": args.q, "n": args.n, "r": args.r, "u": str(args.u),
           "lambda": fields.format_scalar(lambda_of_u(args.q, args.u)),
           "value": fields.format_scalar(value) if isinstance(value, Fraction) else None,
           "float": format(float(value), ".17g")}
    _emit(out)
    return 0


def cmd_heat_trace(args) -> int:
    value, tail = gamma_heat_trace(args.q, args.n, args.r, args.t, args.terms)
    _emit({"q": args.q, "n": args.n, "r": args.r, "t": str(args.t), "terms": args.terms,
           "value": format(value, ".17g"), "tail_bound": format(tail, ".17g")})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphzeta", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def graph_cmd(name, fn, help_, mode=True, system=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="graph JSON file")
        if mode:
            sp.add_argument("--mode", choices=[REGULAR, GENERAL], default=GENERAL)
        if system:
            sp.add_argument("--local-system", help="local-system JSON file")
        sp.set_defaults(func=fn)
        return sp

    sp = graph_cmd("zeta", cmd_zeta, "zeta polynomial or truncated log-series")
    sp.add_argument("--method", choices=sorted(METHODS) + ["geodesic"], default="bass")
    sp.add_argument("--max-len", type=_positive_int)
    sp.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")

    sp = graph_cmd("geodesics", cmd_geodesics, "primitive closed geodesics")
    sp.add_argument("--max-len", type=_positive_int, required=True)

    graph_cmd("verify-main", cmd_verify_main, "check Z = det / det_Gamma exactly", mode=False)

    sp = graph_cmd("cover", cmd_cover, "random group or permutation cover", system=False)
    sp.add_argument("--group", help="e.g. Z2^3")
    sp.add_argument("--degree", type=_positive_int)
    sp.add_argument("--seed", type=_positive_int)

    sp = graph_cmd("tower", cmd_tower, "mod-p homology tower", system=False)
    sp.add_argument("--prime", type=_positive_int, required=True)
    sp.add_argument("--levels", type=_positive_int, required=True)
    sp.add_argument("--index-cap", type=_positive_int, required=True)

    sp = graph_cmd("converge", cmd_converge, "cover-sequence convergence CSV", mode=False, system=False)
    sp.add_argument("--covers", required=True, help="e.g. trivial,homology:1,random:4")
    sp.add_argument("--u", type=_rational, required=True)
    sp.add_argument("--seed", type=_positive_int)

    sp = sub.add_parser("l2det", help="closed-form L2-determinant")
    for name in ("q", "n", "r"):
        sp.add_argument(f"--{name}", type=_positive_int, required=True)
    sp.add_argument("--u", type=_rational, required=True)
    sp.set_defaults(func=cmd_l2det)

    sp = sub.add_parser("heat-trace", help="tree heat trace tr_Gamma exp(-t Delta)")
    for name in ("q", "n", "r"):
        sp.add_argument(f"--{name}", type=_positive_int, required=True)
    sp.add_argument("--t", type=_rational, required=True)
    sp.add_argument("--terms", type=_positive_int, default=40)
    sp.set_defaults(func=cmd_heat_trace)
    return p


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(f"error: {kind}: {' '.join(str(message).split())}\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail("usage", exc, 1)
    except GraphZetaError as exc:
        return _fail(exc.kind, exc, exc.exit_code)
    except (ValueError, ZeroDivisionError) as exc:
        return _fail("validation", exc, ValidationError.exit_code)


if __name__ == "__main__":
    sys.exit(main())
