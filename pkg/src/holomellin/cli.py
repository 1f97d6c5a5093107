"""``holomellin`` command line tool.

Exit status: 0 on success, 1 on domain errors (bad operator, failed
verification, oracle failure), 2 on usage errors.
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from .algebra import format_scalar
from .errors import HolomellinError
from .forward import ode_to_mellin_rec
from .inverse import rec_to_ode
from .operators import DiffOp, RecOp, apply_recop, normalize_diffop, normalize_recop
from .oracle import (
    default_max_terms,
    expand,
    numeric_boundary,
    numeric_mellin,
)
from .parsing import from_json, parse_operator, to_json
from .solvers import hyper_solutions, rational_ode_solutions

log = logging.getLogger("holomellin")


def _load(spec, kind, label):
    """An operator from an inline expression or a JSON file path."""
    if spec is None:
        raise HolomellinError(f"no {label} given")
    if os.path.isfile(spec):
        try:
            with open(spec, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise HolomellinError(f"{spec}: malformed JSON ({exc})") from None
        op = from_json(data)
        op = normalize_diffop(op) if isinstance(op, DiffOp) else normalize_recop(op)
        cleared = None
    else:
        parsed = parse_operator(spec, kind=kind, with_report=True)
        op = parsed.op
        cleared = None if parsed.cleared.degree <= 0 else str(parsed.cleared)
    expected = DiffOp if kind == "diffop" else RecOp
    if not isinstance(op, expected):
        raise HolomellinError(f"{label} must be a {kind}")
    return op, cleared


def _input(args, kind):
    spec = args.expr if args.expr is not None else args.file
    if args.expr is not None and args.file is not None:
        raise HolomellinError("give either --expr or --file, not both")
    if spec is None:
        raise HolomellinError("an operator is required (--expr or --file)")
    return _load(spec, kind, "input")


def _parse_init(text):
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        raise HolomellinError(f"--init expects comma-separated rationals, got {text!r}") from None


def _emit(args, payload, pretty_lines, out):
    if args.pretty:
        for line in pretty_lines:
            print(line, file=out)
    else:
        print(json.dumps(payload, indent=2), file=out)


def cmd_mellin(args, out):
    ode, cleared = _input(args, "diffop")
    rec = ode_to_mellin_rec(ode)
    payload = {"input": to_json(ode), "result": to_json(rec)}
    if cleared:
        payload["cleared_denominator"] = cleared
    _emit(args, payload, [str(rec)], out)
    return 0


def cmd_invmellin(args, out):
    rec, cleared = _input(args, "recop")
    trace = [] if args.trace else None
    ode = rec_to_ode(rec, trace=trace)
    payload = {"input": to_json(rec), "result": to_json(ode)}
    if cleared:
        payload["cleared_denominator"] = cleared
    if trace is not None:
        payload["trace"] = trace
    lines = (trace or []) + [str(ode)]
    _emit(args, payload, lines, out)
    return 0


def cmd_series(args, out):
    ode, _ = _input(args, "diffop")
    init = _parse_init(args.init)
    s = expand(ode, init, args.terms, exact=not args.float)
    coeffs = [format_scalar(c) if s.exact else repr(c) for c in s.coeffs]
    payload = {"ode": to_json(ode), "initial": [format_scalar(c) for c in init], "coeffs": coeffs}
    _emit(args, payload, [", ".join(coeffs)], out)
    return 0


def cmd_solve_rec(args, out):
    rec, _ = _input(args, "recop")
    certs = hyper_solutions(rec, max_factor_degree=args.max_factor_degree)
    payload = {"input": to_json(rec), "certificates": [{"ratio": str(c.ratio)} for c in certs]}
    _emit(args, payload, [f"y(n+1)/y(n) = {c.ratio}" for c in certs], out)
    return 0


def cmd_solve_ode(args, out):
    ode, _ = _input(args, "diffop")
    sols = rational_ode_solutions(ode, args.max_pole_order, args.max_numerator_degree)
    payload = {"input": to_json(ode), "solutions": [str(s.value) for s in sols]}
    _emit(args, payload, [str(s.value) for s in sols], out)
    return 0


def cmd_verify(args, out):
    ode, _ = _load(args.ode, "diffop", "--ode")
    rec, _ = _load(args.rec, "recop", "--rec")
    init = _parse_init(args.init)
    max_terms = args.terms or default_max_terms()
    s = expand(ode, init, max(len(init) + 8, 128))
    tol = args.tol
    inner = tol / 100
    count = args.n_max + rec.order + 1
    moments = [numeric_mellin(s, n, tol=inner, max_terms=max_terms) for n in range(count)]
    boundary = {}
    for sym in rec.inhom:
        if sym.kind == "deriv":
            boundary[sym] = numeric_boundary(s, sym.index, tol=inner).value
        else:
            boundary[sym] = numeric_mellin(s, sym.index, tol=inner, max_terms=max_terms).value
    residuals = apply_recop(rec, [m.value for m in moments], boundary)
    worst = max(abs(r) for r in residuals)
    passed = worst < tol
    payload = {
        "ode": to_json(ode),
        "rec": to_json(rec),
        "n_max": args.n_max,
        "tol": tol,
        "residuals": residuals,
        "max_residual": worst,
        "oracle_bound": max(m.error_bound for m in moments),
        "passed": passed,
    }
    status = "PASS" if passed else "FAIL"
    _emit(args, payload, [f"{status}: max residual {worst:.3e} over n = 0..{args.n_max} (tol {tol:g})"], out)
    return 0 if passed else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="holomellin",
        description="Convert between holonomic ODEs and recurrences for Mellin transforms.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("--expr", help="operator expression")
            sp.add_argument("--file", help="operator JSON file")
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="JSON output (default)")
        fmt.add_argument("--pretty", action="store_true", help="human-readable output")

    sp = sub.add_parser("mellin", help="ODE for f -> recurrence for its Mellin transform")
    common(sp)
    sp.set_defaults(func=cmd_mellin)

    sp = sub.add_parser("invmellin", help="recurrence for M[f](n) -> ODE for f")
    common(sp)
    sp.add_argument("--trace", action="store_true", help="show every reduction pass")
    sp.set_defaults(func=cmd_invmellin)

    sp = sub.add_parser("series", help="Taylor coefficients of an ODE solution")
    common(sp)
    sp.add_argument("--init", required=True, help="leading coefficients, e.g. 1 or 0,1")
    sp.add_argument("--terms", type=int, default=10, help="truncation order K")
    sp.add_argument("--float", action="store_true", help="double precision instead of exact")
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("solve-rec", help="hypergeometric solutions of a recurrence")
    common(sp)
    sp.add_argument("--max-factor-degree", type=int, default=3)
    sp.set_defaults(func=cmd_solve_rec)

    sp = sub.add_parser("solve-ode", help="rational solutions of an ODE")
    common(sp)
    sp.add_argument("--max-pole-order", type=int, default=6)
    sp.add_argument("--max-numerator-degree", type=int, default=12)
    sp.set_defaults(func=cmd_solve_ode)

    sp = sub.add_parser("verify", help="check a recurrence on numeric Mellin moments of an ODE solution")
    common(sp, with_input=False)
    sp.add_argument("--ode", required=True, help="ODE expression or JSON file")
    sp.add_argument("--rec", required=True, help="recurrence expression or JSON file")
    sp.add_argument("--init", required=True, help="leading Taylor coefficients of the solution")
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--terms", type=int, default=None, help="maximum series terms")
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        return args.func(args, out)
    except HolomellinError as exc:
        print(f"holomellin {args.command}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
