"""Command-line entry point.

Exit codes: 0 success, 1 usage or invalid input, 2 a verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- output ---------------------------------------------------------------------

def fmt_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return format(v, ".15g")
    if v is None:
        return ""
    try:
        import mpmath
        if isinstance(v, mpmath.mpf):
            return mpmath.nstr(v, 15, strip_zeros=False, min_fixed=-4, max_fixed=15)
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def _json_value(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v
    if v is None:
        return None
    if isinstance(v, float) or type(v).__name__ == "mpf":
        return float(format(float(v), ".15g"))
    return fmt_value(v)


def emit(rows: list[dict], fmt: str = "csv", header: list[str] | None = None) -> str:
    """Render rows as CSV (one header line) or a JSON list of objects.

    Keys keep their insertion order, so output is deterministic.
    """
    if header is None:
        header = list(rows[0]) if rows else []
    if fmt == "json":
        out = [{k: _json_value(r.get(k)) for k in header} for r in rows]
        return json.dumps(out, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt_value(r.get(k)) for k in header])
    return buf.getvalue()


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e}") from e


# -- shared helpers -------------------------------------------------------------------

def _sign(s: str) -> int:
    if s not in ("+", "-"):
        raise argparse.ArgumentTypeError("sign must be + or -")
    return 1 if s == "+" else -1


def _pos_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError(f"{s} must be positive")
    return v


def _bound(s: str) -> int:
    try:
        v = int(float(s)) if ("e" in s.lower() or "." in s) else int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a number")
    if not 1 <= v <= 10**9:
        raise argparse.ArgumentTypeError(f"bound {s} must lie in [1, 1e9]")
    return v


def _stream(args, sign, X):
    """Irreducible classes, through the cache when a cache directory is configured."""
    from .enumeration import CACHE_ENV, EnumerationTask, enumerate_orbits, load_or_build_cache
    cache = args.cache or os.environ.get(CACHE_ENV)
    if cache:
        return load_or_build_cache(EnumerationTask.make(sign, X, args.threads), cache)
    return enumerate_orbits(sign, X, threads=args.threads)


def load_paper_tables() -> dict:
    text = resources.files("cubicfields").joinpath("data/paper_tables.json").read_text(encoding="utf-8")
    return json.loads(text)


# -- subcommands ---------------------------------------------------------------------------

def cmd_fields(args):
    s = _stream(args, args.sign, args.max_disc)
    mask = s.maximal_mask() if not args.all_classes else None
    rows = []
    for i in range(len(s)):
        if mask is not None and not mask[i]:
            continue
        a, b, c, d = (int(x) for x in s.forms[i])
        rows.append({"disc": int(s.discs[i]), "a": a, "b": b, "c": c, "d": d,
                     "stab": int(s.stab[i]), "irreducible": bool(s.irreducible[i])})
    _write(emit(rows, args.format, ["disc", "a", "b", "c", "d", "stab", "irreducible"]), args.output)
    return EXIT_OK


def cmd_census(args):
    from .census import census_by_progression, count_weighted_classes
    s = _stream(args, args.sign, args.max_disc)
    if args.weighted:
        w = count_weighted_classes(args.sign, args.max_disc, s)
        rows = [{"sign": "+" if w.sign > 0 else "-", "max_disc": w.X, "weighted_count": w.value}]
        _write(emit(rows, args.format), args.output)
        return EXIT_OK
    t = census_by_progression(args.sign, args.max_disc, args.modulus, s)
    rows = [{"modulus": t.modulus, "residue": r, "count": c} for r, c in enumerate(t.counts)]
    _write(emit(rows, args.format, ["modulus", "residue", "count"]), args.output)
    return EXIT_OK


def cmd_tables(args):
    from .census import census_by_progression, count_cubic_fields
    gold = load_paper_tables()
    sign = 1 if gold["sign"] == "+" else -1
    X = int(gold["max_disc"])
    s = _stream(args, sign, X)
    rows = []
    mismatch = False
    for m, paper in sorted(gold["tables"].items(), key=lambda kv: int(kv[0])):
        t = census_by_progression(sign, X, int(m), s)
        for r, c in enumerate(t.counts):
            row = {"modulus": int(m), "residue": r, "count": c}
            if args.reproduce_paper:
                row["paper"] = paper[r]
                row["diff"] = c - paper[r]
                mismatch |= c != paper[r]
            rows.append(row)
    total = count_cubic_fields(sign, X, s)
    if args.reproduce_paper:
        mismatch |= total != gold["total"]
        rows.append({"modulus": 1, "residue": 0, "count": total, "paper": gold["total"],
                     "diff": total - gold["total"]})
    _write(emit(rows, args.format), args.output)
    return EXIT_MISMATCH if mismatch else EXIT_OK


def cmd_torsion(args):
    from .classgroups import torsion_census
    if args.sign > 0 and args.route != "cubic":
        raise UsageError("positive discriminants use --route cubic")
    stream = _stream(args, args.sign, args.max_disc) if args.route != "bqf" else None
    try:
        tc = torsion_census(args.sign, args.max_disc, args.route, stream)
    except AssertionError as e:
        sys.stderr.write(f"route mismatch: {e}\n")
        return EXIT_MISMATCH
    rows = []
    for i, D in enumerate(tc.discs):
        rows.append({"D": int(D), "h": None if tc.h is None else int(tc.h[i]), "cl3": int(tc.cl3[i])})
    _write(emit(rows, args.format, ["D", "h", "cl3"]), args.output)
    return EXIT_OK


def cmd_hough(args):
    from . import hough as H
    if args.region is not None:
        r = H.count_in_region(args.max_d, args.region, args.k)
        row = {"X": r.X, "Y": r.Y, "k": r.k, "discriminants": r.discriminants, "count": r.count,
               "expected": r.expected, "ratio": r.ratio, "fundamental_count": r.fundamental_count,
               "torsion_sum": r.torsion_sum, "cusp_violations": r.cusp_violations}
        _write(emit([row], args.format), args.output)
        bad = r.cusp_violations or (r.k == 3 and r.fundamental_count != r.torsion_sum)
        return EXIT_MISMATCH if bad else EXIT_OK
    if args.histogram is not None:
        rows = [{"bin_lo": lo, "bin_hi": hi, "count": c}
                for lo, hi, c in H.vertical_histogram(args.max_d, args.histogram, args.k)]
        _write(emit(rows, args.format, ["bin_lo", "bin_hi", "count"]), args.output)
        return EXIT_OK
    rows = []
    for D in H.hough_discriminants(args.max_d):
        for s in H.soundararajan_solutions(int(D), args.k, args.norm_bound):
            I = H.ideal_of_solution(s)
            rows.append({"D": s.D, "l": s.l, "m": s.m, "n": s.n, "t": s.t,
                         "norm": s.norm, "principal": I.principal})
    _write(emit(rows, args.format, ["D", "l", "m", "n", "t", "norm", "principal"]), args.output)
    return EXIT_OK


def cmd_phihat(args):
    from .maximality import phihat_abs_sum
    rows = []
    for q in args.q:
        r = phihat_abs_sum(q)
        rows.append({"q": r.q, "densityNonmaximal": r.density_nonmaximal,
                     "absSum": r.abs_sum, "termCount": r.term_count})
    _write(emit(rows, args.format, ["q", "densityNonmaximal", "absSum", "termCount"]), args.output)
    return EXIT_OK


def cmd_constants(args):
    from .asymptotics import constants_report
    rows = [{"name": name, "value": b.value, "bound": b.bound, "method": b.method}
            for name, b in constants_report(args.precision)]
    fmt = args.format if args.format_given else "json"
    _write(emit(rows, fmt, ["name", "value", "bound", "method"]), args.output)
    return EXIT_OK


def cmd_fit(args):
    from .asymptotics import fit_secondary
    try:
        with open(args.input, encoding="utf-8") as fh:
            reader = csv.DictReader(line for line in fh if not line.startswith("#"))
            grid = [(float(r["X"]), float(r["count"])) for r in reader]
    except (OSError, KeyError, ValueError) as e:
        raise UsageError(f"cannot read {args.input}: expected columns X,count ({e})") from e
    f = fit_secondary(grid)
    rows = [{"A": f.A, "B": f.B, "residual": f.residual, "points": len(f.grid)}]
    _write(emit(rows, args.format), args.output)
    return EXIT_OK


def cmd_bst_check(args):
    from .census import bst_offenders, verify_bst_identity
    lhs, rhs = verify_bst_identity(args.p, args.sign, args.max_disc)
    rows = [{"p": args.p, "sign": "+" if args.sign > 0 else "-", "max_disc": args.max_disc,
             "lhs": lhs, "rhs": rhs, "equal": lhs == rhs}]
    _write(emit(rows, args.format), args.output)
    if lhs != rhs:
        for rec in bst_offenders(args.p, args.sign, args.max_disc):
            sys.stderr.write(f"nonmaximal at {args.p}: {tuple(rec.canonical)} disc {rec.disc}\n")
        return EXIT_MISMATCH
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    common.add_argument("--threads", type=_pos_int, default=1)
    common.add_argument("--cache", default=None,
                        help="cache directory (default: $CUBICFIELDS_CACHE, else no cache)")

    p = _Parser(prog="cubicfields", description="Cubic field counts and their secondary terms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def signed(name, help):
        q = sub.add_parser(name, parents=[common], help=help)
        q.add_argument("--sign", type=_sign, required=True)
        q.add_argument("--max-disc", type=_bound, required=True)
        return q

    q = signed("fields", "list cubic fields (or all classes) below a bound")
    q.add_argument("--all-classes", action="store_true", help="include nonmaximal classes")
    q.set_defaults(func=cmd_fields)

    q = signed("census", "count cubic fields in residue classes")
    q.add_argument("--modulus", type=_pos_int, default=1)
    q.add_argument("--weighted", action="store_true", help="weighted count of all irreducible classes")
    q.set_defaults(func=cmd_census)

    q = sub.add_parser("tables", parents=[common], help="progression tables for 0 < D < 2e6")
    q.add_argument("--reproduce-paper", action="store_true", help="diff against the published counts")
    q.set_defaults(func=cmd_tables)

    q = signed("torsion", "3-torsion counts of quadratic class groups")
    q.add_argument("--route", choices=["cubic", "bqf", "both"], default="both")
    q.set_defaults(func=cmd_torsion)

    q = sub.add_parser("hough", parents=[common], help="torsion ideals and Heegner points")
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--max-d", type=_bound, required=True)
    q.add_argument("--norm-bound", type=_pos_int, default=100)
    q.add_argument("--region", type=float, default=None, metavar="Y")
    q.add_argument("--histogram", type=_pos_int, default=None, metavar="BINS")
    q.set_defaults(func=cmd_hough)

    q = sub.add_parser("phihat", parents=[common], help="sums of the dual nonmaximality indicator")
    q.add_argument("--q", type=_pos_int, nargs="+", default=[2, 5, 7])
    q.set_defaults(func=cmd_phihat)

    q = sub.add_parser("constants", parents=[common], help="special values with error bounds")
    q.add_argument("--precision", type=_pos_int, default=20, help="decimal digits")
    q.set_defaults(func=cmd_constants)

    q = sub.add_parser("fit", parents=[common], help="least squares for A X + B X^(5/6)")
    q.add_argument("--input", required=True, help="CSV with columns X,count")
    q.set_defaults(func=cmd_fit)

    q = signed("bst-check", "check the nonmaximality identity at a prime")
    q.add_argument("--p", type=_pos_int, required=True)
    q.set_defaults(func=cmd_bst_check)
    return p


def _validate(args):
    if args.command == "hough":
        if args.k < 3 or args.k % 2 == 0:
            raise UsageError("--k must be odd and at least 3")
        if args.region is not None and args.region <= 0:
            raise UsageError("--region must be positive")
        if args.max_d > 10**6:
            raise UsageError("--max-d is limited to 1e6")
    if args.command == "census" and args.modulus > 10**4:
        raise UsageError("--modulus must lie in [1, 10000]")
    if args.command == "phihat" and any(q > 10 for q in args.q):
        raise UsageError("--q values above 10 exceed the memory budget")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.format_given = args.format is not None
        if args.format is None:
            args.format = "csv"
        _validate(args)
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except ValueError as e:
        sys.stderr.write(f"cubicfields: error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help exits 0; anything else from argparse is a usage error
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
