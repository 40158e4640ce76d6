"""Command-line front end.

Subcommands: gr (classify a level and print its presentation and order),
reduce (canonical representative of an element), symbol (evaluate a
restricted symbol), verify-q1 (brute-force comparison on a fixture field),
shift-check (consistency of the (n, m) -> (n-1, m-e) shift), selftest.

Exit codes: 0 success, 1 mismatch or property failure, 2 usage/validation.
"""

from __future__ import annotations

import argparse
import sys

from . import graded, oracle, reports
from .ffield import ParseError
from .forms import parse_form
from .graded import (CDVFParams, MalformedSymbol, OutOfRangeLevel,
                     PreconditionViolated, WindowOverflow, descriptor,
                     graded_order, level_shift_consistency, parse_symbol,
                     reduce, symbol_to_forms)


def _add_params_flags(sub):
    sub.add_argument("--p", type=int, required=True, help="residue characteristic")
    sub.add_argument("--f", type=int, default=1, help="residue degree over GF(p)")
    sub.add_argument("--r", type=int, default=0, help="p-basis size of the residue field")
    sub.add_argument("--e", type=int, required=True, help="absolute ramification index")
    sub.add_argument("--n", type=int, required=True, help="modulus exponent of p^n")
    sub.add_argument("--q", type=int, default=1, help="symbol degree")
    sub.add_argument("--a", type=str, required=True,
                     help="residue class of p*pi^(-e), in the element grammar")


def _params_from(args):
    return CDVFParams(args.p, args.f, args.r, args.e, args.n, args.q, args.a)


def _emit(lines, fmt):
    if fmt == "machine":
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        for line in lines:
            sys.stdout.write(line + "\n")


def _human_or_machine(sub):
    sub.add_argument("--format", choices=["text", "machine"], default="text")


def cmd_gr(args):
    params = _params_from(args)
    if args.m < 1:
        raise OutOfRangeLevel("levels start at m = 1 (gr^0 is outside this presentation)")
    desc = descriptor(params, args.m, window_cap=args.window_cap)
    result = graded_order(desc, radius=args.deg_window)
    _emit(reports.render_descriptor(desc, result), args.format)
    return 0


def cmd_reduce(args):
    params = _params_from(args)
    desc = descriptor(params, args.m, window_cap=args.window_cap)
    w1 = parse_form(params.kctx, params.q - 1, args.w1)
    w2 = parse_form(params.kctx, params.q - 2, args.w2) if args.w2 else None
    el = desc.element(w1, w2)
    red = reduce(el)
    _emit(reports.render_reduce(desc, red, red.is_zero_pair()), args.format)
    return 0


def cmd_symbol(args):
    params = _params_from(args)
    sym = parse_symbol(params.kctx, args.symbol)
    el = symbol_to_forms(params, sym)
    red = reduce(el)
    _emit(reports.render_symbol(el.desc, args.symbol, el, red, red.is_zero_pair()),
          args.format)
    return 0


def cmd_verify_q1(args):
    poly = oracle.load_fixture(args.fixture)
    if poly.e % (poly.p - 1) != 0:
        raise ValueError(f"(p-1) does not divide e = {poly.e}: e_0 is not integral")
    e0 = poly.e // (poly.p - 1)
    c_n = args.n * poly.e + e0
    N = args.N if args.N is not None else c_n + 3
    if N <= c_n:
        raise ValueError(f"cutoff N = {N} must exceed c_n = n*e + e_0 = {c_n}")
    ctx = oracle.build_field(poly, N)
    a_code = ctx.a_residue()
    params = CDVFParams(poly.p, poly.f, 0, poly.e, args.n, 1, str(a_code)
                        if a_code < poly.p else f"g^{ctx.fq.glog(a_code)}")
    table = oracle.unit_group(ctx, args.n, cap=args.cap)
    cmp_report = oracle.compare(ctx, params, table)
    rep_lo = oracle.gr_orders(oracle.unit_group(
        oracle.build_field(poly, c_n + 1), args.n, cap=args.cap))
    rep_hi = oracle.gr_orders(oracle.unit_group(
        oracle.build_field(poly, c_n + 3), args.n, cap=args.cap))
    stable = rep_lo.same_orders(rep_hi)
    _emit(reports.render_compare(cmp_report, stable), args.format)
    return 0 if (cmp_report.all_match and stable) else 1


def cmd_shift_check(args):
    params = _params_from(args)
    rep = level_shift_consistency(params, args.m, radius=args.deg_window,
                                  window_cap=args.window_cap)
    _emit(reports.render_consistency(rep), args.format)
    return 0 if rep.consistent else 1


def cmd_selftest(args):
    from .selftest import run_selftest

    ok, results = run_selftest(seed=args.seed, cases=args.cases)
    _emit(reports.render_selftest(results, args.seed, args.cases), args.format)
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="grmk",
        description="graded quotients of unit-filtered Milnor K-groups mod p^n")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gr = sub.add_parser("gr", help="classify a level and print its presentation")
    _add_params_flags(p_gr)
    p_gr.add_argument("--m", type=int, required=True, help="filtration level")
    p_gr.add_argument("--deg-window", type=int, default=3, dest="deg_window")
    p_gr.add_argument("--window-cap", type=int, default=graded.DEFAULT_WINDOW_CAP,
                      dest="window_cap")
    _human_or_machine(p_gr)
    p_gr.set_defaults(func=cmd_gr)

    p_red = sub.add_parser("reduce", help="canonical representative of an element")
    _add_params_flags(p_red)
    p_red.add_argument("--m", type=int, required=True)
    p_red.add_argument("--w1", type=str, required=True, help="degree q-1 form text")
    p_red.add_argument("--w2", type=str, default=None, help="degree q-2 form text")
    p_red.add_argument("--window-cap", type=int, default=graded.DEFAULT_WINDOW_CAP,
                       dest="window_cap")
    _human_or_machine(p_red)
    p_red.set_defaults(func=cmd_reduce)

    p_sym = sub.add_parser("symbol", help="evaluate a restricted symbol")
    _add_params_flags(p_sym)
    p_sym.add_argument("--symbol", type=str, required=True,
                       help="{1+pi^M*(element); entry; ...} with entries monomials or 'pi'")
    _human_or_machine(p_sym)
    p_sym.set_defaults(func=cmd_symbol)

    p_ver = sub.add_parser("verify-q1",
                           help="brute-force comparison on a fixture field")
    p_ver.add_argument("--fixture", type=str, required=True)
    p_ver.add_argument("--n", type=int, required=True)
    p_ver.add_argument("--N", type=int, default=None, help="cutoff (default c_n + 3)")
    p_ver.add_argument("--cap", type=int, default=oracle.DEFAULT_ENUM_CAP)
    _human_or_machine(p_ver)
    p_ver.set_defaults(func=cmd_verify_q1)

    p_shift = sub.add_parser("shift-check",
                             help="compare presentations at (n, m) and (n-1, m-e)")
    _add_params_flags(p_shift)
    p_shift.add_argument("--m", type=int, required=True)
    p_shift.add_argument("--deg-window", type=int, default=3, dest="deg_window")
    p_shift.add_argument("--window-cap", type=int, default=graded.DEFAULT_WINDOW_CAP,
                         dest="window_cap")
    _human_or_machine(p_shift)
    p_shift.set_defaults(func=cmd_shift_check)

    p_self = sub.add_parser("selftest", help="run the seeded property suites")
    p_self.add_argument("--seed", type=int, default=7)
    p_self.add_argument("--cases", type=int, default=50)
    _human_or_machine(p_self)
    p_self.set_defaults(func=cmd_selftest)

    return parser


USAGE_ERRORS = (ValueError, ParseError, OutOfRangeLevel, MalformedSymbol,
                PreconditionViolated, oracle.NotEisenstein,
                oracle.ParamsMismatch, FileNotFoundError)
RUNTIME_ERRORS = (WindowOverflow, oracle.TooLarge)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except RUNTIME_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
