"""Command-line front end.

Exit codes: 0 success, 2 local obstruction (or no norm solution), 3 search
exhausted or factoring limit hit, 4 verification failure, 64 usage or I/O
error, 70 internal inconsistency. Numbers are printed as exact rationals.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import arith, characters, constellation, hilbert, norms, pipeline, tau
from .errors import (
    FactorizationLimit,
    InsufficientCone,
    InternalInconsistency,
    LocalObstruction,
    NormPencilError,
    SearchExhausted,
)

EXIT_OK = 0
EXIT_OBSTRUCTION = 2
EXIT_EXHAUSTED = 3
EXIT_VERIFY = 4
EXIT_USAGE = 64
EXIT_INTERNAL = 70


class UsageError(Exception):
    code = "USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def _rational_list(text: str) -> list[Fraction]:
    return [arith.as_rational(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _prime_map(text: str, cast) -> dict:
    """``2=3,3=1/2`` -> {2: cast("3"), 3: cast("1/2")}."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        p, _, v = item.partition("=")
        out[int(p)] = cast(v)
    return out


def _search_config(args) -> constellation.SearchConfig:
    return constellation.SearchConfig(max_radius=args.max_radius, count=getattr(args, "count", 1))


# subcommands ------------------------------------------------------------------


def cmd_solve(args, out) -> int:
    instance, local = pipeline.load_problem(args.instance)
    config = pipeline.PipelineConfig(
        search=_search_config(args),
        external_norm_solver=args.external_norm_solver,
    )
    cert = pipeline.solve(instance, local, config)
    text = json.dumps(cert.to_json(), indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    instance, local = pipeline.load_problem(args.instance)
    with open(args.certificate, encoding="utf-8") as fh:
        cert = pipeline.SolutionCertificate.from_json(json.load(fh))
    report = pipeline.verify_certificate(instance, local, cert)
    vertical = report.ok and pipeline.vertical_invariant_vanishing(instance, cert)
    _dump({"ok": report.ok and vertical, "failures": report.reasons, "vertical_invariants_vanish": vertical}, out)
    return EXIT_OK if report.ok and vertical else EXIT_VERIFY


def cmd_tau(args, out) -> int:
    S = _int_list(args.S)
    targets = _prime_map(args.targets, arith.as_rational)
    precisions = _prime_map(args.precisions, int) if args.precisions else {}
    fields = [characters.parse_field(f) for f in args.field]
    cert = tau.find_tau(
        S, targets, arith.as_rational(args.C), _rational_list(args.e), precisions, _search_config(args), fields
    )
    data = cert.to_json()
    data["splitting"] = [
        {"field": str(K), "index": i, "ok": tau.verify_splitting_property(cert, K, i, targets)}
        for K in fields
        for i in range(len(cert.assignments))
    ]
    _dump(data, out)
    return EXIT_OK


def cmd_constellation(args, out) -> int:
    forms = []
    for text in args.form:
        parts = _int_list(text)
        if len(parts) not in (2, 3):
            raise UsageError(f"form {text!r} must be a,b or a,b,c")
        forms.append(constellation.AffineLinearForm(*parts))
    constraints = []
    for text in args.cone:
        parts = _int_list(text)
        if len(parts) != 2:
            raise UsageError(f"cone constraint {text!r} must be alpha,beta")
        constraints.append(tuple(parts))
    constraints = tuple(constraints)
    points = (pt for s in range(args.max_radius + 1) for pt in constellation.shell_points(constraints, s))
    witness = next(points, None)
    if witness is None:
        raise SearchExhausted(args.max_radius, 0)
    cone = constellation.Cone(constraints, witness)
    hits = constellation.find_constellations(forms, cone, _search_config(args))
    _dump([{"point": list(h.point), "primes": list(h.primes)} for h in hits], out)
    return EXIT_OK


def cmd_invariant(args, out) -> int:
    K = characters.parse_field(args.field)
    value = characters.place_invariant(K, arith.as_rational(args.t), hilbert.parse_place(args.place))
    out.write(arith.rational_str(value) + "\n")
    return EXIT_OK


def cmd_hilbert(args, out) -> int:
    value = hilbert.hilbert_symbol(arith.as_rational(args.a), arith.as_rational(args.b), hilbert.parse_place(args.place))
    out.write(arith.rational_str(value) + "\n")
    return EXIT_OK


def cmd_norm(args, out) -> int:
    eq = norms.QuadraticNormEquation(int(args.a), arith.as_rational(args.c))
    if args.action == "test":
        out.write(("true" if norms.global_norm_test(eq) else "false") + "\n")
        return EXIT_OK
    sol = norms.solve(eq)
    if sol is None:
        out.write("no solution\n")
        return EXIT_OBSTRUCTION
    out.write(f"{arith.rational_str(sol.x)} {arith.rational_str(sol.y)}\n")
    return EXIT_OK


def cmd_reciprocity(args, out) -> int:
    K = characters.parse_field(args.field)
    t = arith.as_rational(args.t)
    places = [hilbert.REAL] + list(characters.invariant_places(K, t))
    _dump(
        {
            "invariants": {str(v): arith.rational_str(characters.place_invariant(K, t, v)) for v in places},
            "sum": arith.rational_str(characters.reciprocity_sum(K, t)),
        },
        out,
    )
    return EXIT_OK


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normpencil", description="Rational points on pencils of cyclic norm equations.")
    parser.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is sequential")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve an instance file and print a certificate")
    p.add_argument("instance")
    p.add_argument("--max-radius", type=int, default=10_000)
    p.add_argument("--external-norm-solver", default=None, help="command template with {field} {value} {degree}")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-check a certificate against its instance")
    p.add_argument("instance")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tau", help="find tau with prescribed local behaviour")
    p.add_argument("--S", required=True, help="comma-separated primes")
    p.add_argument("--targets", required=True, help="p=tau_p,...")
    p.add_argument("--C", default="0")
    p.add_argument("--e", required=True, help="comma-separated rationals")
    p.add_argument("--precisions", default="", help="p=n,...")
    p.add_argument("--field", action="append", default=[], help="quad:a or chi:m:g=v,...")
    p.add_argument("--max-radius", type=int, default=10_000)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("constellation", help="prime values of affine forms in a cone")
    p.add_argument("--form", action="append", required=True, help="a,b,c for a*x + b*y + c")
    p.add_argument("--cone", action="append", default=[], help="alpha,beta for alpha*x + beta*y > 0")
    p.add_argument("--max-radius", type=int, default=10_000)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=cmd_constellation)

    p = sub.add_parser("invariant", help="local invariant of (K, t) at a place")
    p.add_argument("field")
    p.add_argument("t")
    p.add_argument("place")
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("hilbert", help="Hilbert symbol (a, b)_v in {0, 1/2}")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("place")
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("norm", help="x^2 - a y^2 = c")
    p.add_argument("action", choices=["solve", "test"])
    p.add_argument("a")
    p.add_argument("c")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("reciprocity", help="all local invariants of (K, t) and their sum")
    p.add_argument("field")
    p.add_argument("t")
    p.set_defaults(func=cmd_reciprocity)
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, LocalObstruction):
        return EXIT_OBSTRUCTION
    if isinstance(exc, (SearchExhausted, FactorizationLimit, InsufficientCone)):
        return EXIT_EXHAUSTED
    if isinstance(exc, InternalInconsistency):
        return EXIT_INTERNAL
    return EXIT_USAGE


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"error: USAGE: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"error: IO: {exc}\n")
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        err.write(f"error: IO: invalid JSON: {exc}\n")
        return EXIT_USAGE
    except NormPencilError as exc:
        err.write(f"error: {exc.code}: {exc}\n")
        return _exit_code(exc)
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        err.write(f"error: USAGE: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
