"""Command-line interface: pave, count, minimal-form, order-graph, verify.

Exit codes: 0 success/pure, 2 certification failure, 3 input error,
4 budget exceeded, 5 precision error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from springer_pavings import weyl
from springer_pavings.cells import Window, make_cell, order_graph_dot
from springer_pavings.gamma import (
    GammaError,
    GammaSpec,
    classify_gl4,
    minimal_form,
)
from springer_pavings.lattice import BudgetError, coweights_in_window
from springer_pavings.series import PrecisionError, default_horizon

EXIT_CERT_FAILURE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4
EXIT_PRECISION = 5


class InputError(ValueError):
    pass


def load_gamma(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read gamma file {path}: {exc}") from exc


def gamma_spec_from_json(obj: dict) -> GammaSpec:
    if "entries" not in obj:
        raise InputError("gamma JSON needs an 'entries' list of series literals")
    try:
        return GammaSpec.from_json(obj)
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad gamma literal: {exc}") from exc


def parse_primes(raw: str) -> tuple[int, ...]:
    try:
        primes = tuple(int(x) for x in raw.split(",") if x)
    except ValueError as exc:
        raise InputError(f"bad primes list {raw!r}") from exc
    if not primes:
        raise InputError("no primes supplied")
    return primes


def _emit(obj: dict, path: Optional[str]) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_pave(args) -> int:
    from springer_pavings.paving import gl3_paving_certified, gl4_paving_certified

    obj = load_gamma(args.gamma)
    gspec = gamma_spec_from_json(obj)
    primes = parse_primes(args.primes)
    for q in primes:
        if q <= gspec.d:
            raise InputError(f"prime {q} must exceed the group size {gspec.d}")
    if args.d != gspec.d:
        raise InputError(f"gamma has {gspec.d} entries, not {args.d}")
    if args.d == 3:
        if args.no_minimize:
            from springer_pavings.gamma import is_minimal_form

            nu = gspec.nu_int()
            if not (is_minimal_form(nu) and nu[0][1] <= nu[1][2]):
                raise GammaError("not minimal form")
            work = gspec
        else:
            cert = minimal_form(gspec)
            work = gspec.permute(cert.perm)
        v = tuple(args.v) if args.v else (2 * args.m, -args.m, -args.m)
        _, report = gl3_paving_certified(
            work, v, primes, budget=args.budget, jobs=args.jobs
        )
    elif args.d == 4:
        if args.no_minimize:
            from springer_pavings.gamma import is_minimal_form

            if not is_minimal_form(gspec.nu_int()):
                raise GammaError("not minimal form")
        _, report = gl4_paving_certified(
            gspec, args.m, primes, budget=args.budget, jobs=args.jobs,
            minimize=not args.no_minimize,
        )
    else:
        raise InputError("pave supports d in {3, 4}")
    _emit(report.to_json(), args.emit)
    return 0 if report.status == "pure" else EXIT_CERT_FAILURE


def _parse_cell(raw: str, d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    try:
        a_raw, w_raw = raw.split(":")
        a = tuple(int(x) for x in a_raw.split(","))
        w = tuple(int(x) for x in w_raw.split(","))
    except ValueError as exc:
        raise InputError(f"bad --cell {raw!r}; expected a1,..,ad:w1,..,wd") from exc
    if len(a) != d or len(w) != d:
        raise InputError(f"--cell needs {d} shift and {d} coweight entries")
    return a, w


def cmd_count(args) -> int:
    from springer_pavings.springer import count_cell, count_region

    obj = load_gamma(args.gamma)
    gspec = gamma_spec_from_json(obj)
    q = args.prime
    gspec.validate_mod_p(q)
    horizon = default_horizon(gspec.d, args.m, gspec.nu_max())
    gd = gspec.instantiate(q, horizon)
    window = Window(m_low=args.m)
    if args.cell:
        a, w = _parse_cell(args.cell, gspec.d)
        cell = make_cell(a, w, window)
        res = count_cell(cell, gd, q, budget=args.budget, jobs=args.jobs)
    else:
        cells = [
            make_cell((0,) * gspec.d, w, window)
            for w in coweights_in_window(gspec.d, args.m, args.degree)
        ]
        res = count_region(
            cells, gd, q, budget=args.budget, jobs=args.jobs,
            region=f"window(m={args.m},deg={args.degree})",
        )
    _emit(res.to_json(), args.emit)
    return 0


def cmd_minimal_form(args) -> int:
    obj = load_gamma(args.gamma)
    gspec = gamma_spec_from_json(obj)
    if args.prime:
        gspec.validate_mod_p(args.prime)
    cert = minimal_form(gspec)
    out = cert.to_json()
    if gspec.d == 4:
        out["type"] = classify_gl4(cert).kind
    _emit(out, args.emit)
    return 0


def cmd_order_graph(args) -> int:
    a = tuple(int(x) for x in args.shift.split(",")) if args.shift else (0,) * args.d
    if len(a) != args.d:
        raise InputError("shift length must match d")
    points = coweights_in_window(args.d, args.m, args.degree)
    dot = order_graph_dot(points, a)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)
    return 0


def cmd_verify(args) -> int:
    from springer_pavings.acceptance import run_acceptance

    results = run_acceptance(
        seed=args.seed, jobs=args.jobs, budget=args.budget, fast=args.fast
    )
    ok = True
    for name, passed, detail in results:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        ok = ok and passed
    return 0 if ok else EXIT_CERT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="springer",
        description="Affine-space pavings of affine Springer fibers, "
        "certified by point counts over prime fields.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--budget", type=int, default=None,
                       help="max point tests per region (env SPRINGER_BUDGET)")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")
        p.add_argument("--emit", help="write JSON output to this path")

    p = sub.add_parser("pave", help="build and certify a paving")
    p.add_argument("--gamma", required=True, help="gamma JSON file")
    p.add_argument("-d", type=int, required=True, choices=(3, 4))
    p.add_argument("-m", type=int, default=1, help="window exponent")
    p.add_argument("--v", type=int, nargs="+", help="explicit dominant v (d=3)")
    p.add_argument("--primes", default="5,7")
    p.add_argument("--no-minimize", action="store_true",
                   help="reject gamma not already in minimal form")
    common(p)
    p.set_defaults(func=cmd_pave)

    p = sub.add_parser("count", help="brute-force Springer point count")
    p.add_argument("--gamma", required=True)
    p.add_argument("-p", "--prime", type=int, required=True)
    p.add_argument("-m", type=int, default=1)
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--cell", help="a1,..,ad:w1,..,wd restricts to one cell")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("minimal-form", help="Weyl conjugation into minimal form")
    p.add_argument("--gamma", required=True)
    p.add_argument("-p", "--prime", type=int, help="also validate mod p")
    common(p)
    p.set_defaults(func=cmd_minimal_form)

    p = sub.add_parser("order-graph", help="DOT Hasse diagram of the closure order")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-m", type=int, default=1)
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--shift", help="comma-separated Iwahori shift")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_order_graph)

    p = sub.add_parser("verify", help="run the full acceptance suite")
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument("--fast", action="store_true",
                   help="skip the large-prime GL4 runs")
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.__dict__.get("budget") is None and hasattr(args, "budget"):
        env = os.environ.get("SPRINGER_BUDGET")
        if env:
            try:
                args.budget = int(env)
            except ValueError:
                print(f"bad SPRINGER_BUDGET {env!r}", file=sys.stderr)
                return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, GammaError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "kind": "input"}), file=sys.stderr)
        return EXIT_INPUT
    except BudgetError as exc:
        print(json.dumps({"error": str(exc), "kind": "budget"}), file=sys.stderr)
        return EXIT_BUDGET
    except PrecisionError as exc:
        print(json.dumps({"error": str(exc), "kind": "precision"}), file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
