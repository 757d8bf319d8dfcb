"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 size cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import bounds, coefficients, penrose, series, splitting
from .graphcore import CapExceededError
from .models import parse_model

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, out) -> None:
    """Artifact to --out when given, else to stdout."""
    if args.out:
        write_atomic(args.out, text)
        print(f"wrote {args.out}", file=out)
    else:
        out.write(text if text.endswith("\n") else text + "\n")


def _verdict(ok: bool) -> str:
    return "pass" if ok else "FAIL"


# ---------------------------------------------------------------- commands

def cmd_verify_partition(args, out) -> int:
    report = penrose.verify_partition(args.n, workers=args.parallel, perturb=args.self_test_negative)
    if args.format == "json":
        _emit(args, report.to_json(), out)
    else:
        _emit(args, report.to_text(), out)
    if args.out:
        print(report.summary(), file=out)
    return EXIT_OK if report.ok else EXIT_CHECK


def cmd_count_splittable(args, out) -> int:
    n = args.n
    if n < 2:
        raise UsageError("--n must be >= 2")
    rows = splitting.splittable_rows(n, workers=args.parallel)
    if args.self_test_negative:
        rows[0] = (rows[0][0], rows[0][1], rows[0][2] + 1)
    counts = {l: c for _, l, c in rows}
    lines = ["n,l,count"] + [f"{a},{b},{c}" for a, b, c in rows]
    _emit(args, "\n".join(lines), out)

    checks = []
    expected = (n - 2) ** (n - 2)
    checks.append((f"non-splittable count {counts[1]} = (n-2)^(n-2) = {expected}", counts[1] == expected))
    total = sum(counts.values())
    checks.append((f"total {total} = n^(n-2) = {n ** (n - 2)}", total == n ** (n - 2)))
    t1 = series.t1_series(max(n - 1, 1))
    gf_ok = all(c == math.factorial(n - 1) * (t1 ** l)[n - 1] for l, c in counts.items())
    checks.append(("count(n,l) = (n-1)! [z^(n-1)] T1^l for every l", gf_ok))
    for text, ok in checks:
        print(f"{text}: {_verdict(ok)}", file=out)
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_CHECK


def cmd_identities(args, out) -> int:
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    t1 = None
    if args.self_test_negative:
        degree = max(1, (args.order + 1) // 2)
        t1 = series.perturbed_t1(args.order + 2, degree)
        print(f"negative control: T1 coefficient of degree {degree} bumped by 1", file=out)
    results = series.identity_suite(args.order, t1)
    for r in results:
        print(r.line(), file=out)
    if args.show_series:
        print("T1(z) =", file=out)
        print(series.format_series(series.t1_series(args.order)), file=out)
    ok = all(r.passed for r in results)
    print(f"identities: {sum(r.passed for r in results)}/{len(results)} pass", file=out)
    return EXIT_OK if ok else EXIT_CHECK


def _routes(choice: str) -> list[str]:
    return list(coefficients.ROUTES) if choice == "all" else [choice]


def cmd_coeffs(args, out) -> int:
    try:
        model = parse_model(args.model)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    routes = _routes(args.route)
    if args.self_test_negative and len(routes) == 1:
        routes.append("reversion" if routes[0] == "bell" else "bell")
    tables = [coefficients.compute_table(model, args.nmax, r) for r in routes]
    if args.self_test_negative:
        tables[-1].beta[-1] += 1
    agree = coefficients.tables_agree(tables)

    if args.format == "json":
        text = json.dumps({"tables": [t.to_dict() for t in tables], "routes_agree": agree}, indent=2)
    elif args.format == "csv":
        text = ",".join(coefficients.CoefficientTable.CSV_HEADER) + "\n"
        text += "".join(",".join(row) + "\n" for t in tables for row in t.csv_rows())
    else:
        text = _coeff_text(model.name, tables)
    _emit(args, text, out)
    if len(tables) > 1:
        print(f"routes agree: {'yes' if agree else 'no'}", file=out)
    return EXIT_OK if agree else EXIT_CHECK


def _coeff_text(model: str, tables) -> str:
    head = ["n", "b_n"] + [f"beta_n[{t.route}]" for t in tables]
    rows = [[str(n), str(tables[0].b[n - 1])] + [str(t.beta[n - 1]) for t in tables]
            for n in range(1, tables[0].nmax + 1)]
    widths = [max(len(r[i]) for r in rows + [head]) for i in range(len(head))]
    lines = [f"model {model}"]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in [head] + rows]
    return "\n".join(lines)


def cmd_bounds(args, out) -> int:
    if not args.u > 0:
        raise UsageError("--u must be positive")
    result = bounds.radius_bound(args.u, args.tol)
    gap = result.equivalence_gap
    if args.self_test_negative:
        gap += 1e-6
        print("negative control: radius coefficient shifted by 1e-6", file=out)
    ok = gap <= 10 * args.tol
    text = ",".join(bounds.BoundResult.CSV_FIELDS) + "\n" + ",".join(result.csv_row())
    _emit(args, text, out)
    print(f"equivalence |radius_coeff - alpha| = {gap:.3e} <= {10 * args.tol:.1e}: {_verdict(ok)}", file=out)
    if math.isclose(args.u, 1.0):
        print(f"reported anchors at u=1: {bounds.GROENEVELD_ANCHOR_U1} (positive potentials), "
              f"{bounds.LEBOWITZ_PENROSE_ANCHOR_U1} (Lebowitz-Penrose)", file=out)
        print(f"computed alpha(1) = {bounds.fmt15(result.alpha)}; "
              f"difference from {bounds.GROENEVELD_ANCHOR_U1} is "
              f"{bounds.GROENEVELD_ANCHOR_U1 - result.alpha:+.6e} (acceptance uses the computed root)", file=out)
    if args.nmax:
        print("n,bound", file=out)
        for row in bounds.virial_bound_table(args.u, args.C, args.nmax):
            print(f"{row.n},{bounds.fmt15(row.bound)}", file=out)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_curve(args, out) -> int:
    lp = None
    if args.lp_table:
        with open(args.lp_table, encoding="utf-8") as fh:
            lp = bounds.read_lp_table(fh.read())
    try:
        rows = bounds.curve_rows(args.u_min, args.u_max, args.steps, lp)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.self_test_negative:
        raise bounds.EquivalenceError("negative control: forced equivalence failure")
    _emit(args, bounds.curve_csv(rows), out)
    print(f"{len(rows)} grid points, radius_coeff = alpha at every point: pass", file=out)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--parallel", type=int, default=1, metavar="WORKERS",
                        help="worker processes for enumeration (default: 1)")
    common.add_argument("--self-test-negative", action="store_true",
                        help="inject a deliberate error; the run must then exit 1")
    common.add_argument("--out", default=None, help="write the artifact to FILE atomically (default: stdout)")

    p = argparse.ArgumentParser(prog="virialtrees", description=__doc__,
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    s = sub.add_parser("verify-partition", parents=[common], formatter_class=fmt,
                       help="check that Penrose intervals partition the connected graphs on [n]")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_verify_partition)

    s = sub.add_parser("count-splittable", parents=[common], formatter_class=fmt,
                       help="classify trees on [n] by maximal splittability")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_count_splittable)

    s = sub.add_parser("identities", parents=[common], formatter_class=fmt,
                       help="tree generating-function identity suite")
    s.add_argument("--order", type=int, default=12)
    s.add_argument("--show-series", action="store_true", help="also print T1 through the order")
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("coeffs", parents=[common], formatter_class=fmt,
                       help="cluster and virial coefficients by exact routes")
    s.add_argument("--model", default="onepoint", help="onepoint | lattice:a=<int>")
    s.add_argument("--nmax", type=int, default=5)
    s.add_argument("--route", choices=["bell", "reversion", "trees", "all"], default="all")
    s.add_argument("--format", choices=["text", "json", "csv"], default="text")
    s.set_defaults(func=cmd_coeffs)

    s = sub.add_parser("bounds", parents=[common], formatter_class=fmt,
                       help="radius coefficient and roots for one u")
    s.add_argument("--u", type=float, default=1.0)
    s.add_argument("--tol", type=float, default=1e-13)
    s.add_argument("--nmax", type=int, default=0, help="also print virial bounds for n = 1..NMAX")
    s.add_argument("--C", type=float, default=1.0, help="temperedness constant for the bound table")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("curve", parents=[common], formatter_class=fmt,
                       help="radius coefficient over a log-spaced u grid (CSV)")
    s.add_argument("--u-min", type=float, default=0.1)
    s.add_argument("--u-max", type=float, default=10.0)
    s.add_argument("--steps", type=int, default=25)
    s.add_argument("--lp-table", default=None, help="CSV with columns u, lp_bound to overlay")
    s.set_defaults(func=cmd_curve)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (bounds.EquivalenceError, penrose.PartitionSchemeError, ArithmeticError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
