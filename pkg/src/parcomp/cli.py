"""Command-line front end: ``parcomp {expand,complexity,compare,validate}``.

Every command writes a table (CSV with a header row, or JSON) with 12
significant digits and a ``schema_version`` field. Exit codes: 0 success,
2 configuration error, 3 domain or numerical error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .complexity import DEFAULT_NODES, Region, comp_approx, overestimation
from .errors import DegenerateMetricError, DerivativeOrderError, DomainError, ExpansionInvalidError
from .expansion import expansion_terms, spherical_f1_closed_form
from .family import CATALOG_NAMES, ExpFamily, catalog, default_point, load_poly_partition
from .validation import run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_MATH, EXIT_VALIDATION = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(format(v, ".12g")) if math.isfinite(v) else None
    return v


def emit(command: str, columns: list[str], rows: list[dict], fmt: str, stream) -> None:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "columns": columns,
               "rows": [{c: _json_value(r[c]) for c in columns} for r in rows]}
        stream.write(json.dumps(doc, indent=2) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["schema_version"] + columns)
    for r in rows:
        writer.writerow([SCHEMA_VERSION] + [_fmt(r[c]) for c in columns])
    stream.write(buf.getvalue())


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.replace(";", ",").split(",") if x.strip()])
    except ValueError:
        raise ConfigError(f"cannot parse point {text!r}; use comma-separated numbers") from None


def build_family(args) -> ExpFamily:
    if args.family == "poly":
        if not args.poly_json:
            raise ConfigError("--family poly needs --poly-json PATH")
        try:
            return load_poly_partition(args.poly_json)
        except OSError as exc:
            raise ConfigError(str(exc)) from None
    if args.poly_json:
        raise ConfigError("--poly-json only applies to --family poly")
    try:
        return catalog(args.family, args.dim, args.sigma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NML_THREADS", "1")))
    except ValueError:
        raise ConfigError("NML_THREADS must be an integer") from None


def cmd_expand(args) -> tuple[list[str], list[dict]]:
    f = build_family(args)
    points = [_parse_vector(t) for t in args.theta] if args.theta else [default_point(f)]
    rows = []
    for th in points:
        terms = expansion_terms(f, th, args.order)
        F = list(terms.F) + [float("nan")] * (3 - len(terms.F))
        rows.append({"family": f.name, "theta": ";".join(_fmt(float(x)) for x in th),
                     "F0": F[0], "F1": F[1], "F2": F[2], "cramer_ok": f.cramer_label})
    return ["family", "theta", "F0", "F1", "F2", "cramer_ok"], rows


def _region(args, f: ExpFamily) -> Region:
    if args.box:
        box = [tuple(pair) for pair in args.box]
    elif f.name == "exp1d":
        box = [(-math.e, -1.0)]
    else:
        raise ConfigError(f"--box LO HI is required for family {f.name} (one per dimension)")
    try:
        return Region(tuple(box), args.nodes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_complexity(args) -> tuple[list[str], list[dict]]:
    f = build_family(args)
    region = _region(args, f)
    rows = []
    for n in args.n:
        rep = comp_approx(f, region, n, args.s)
        rows.append({"family": f.name, "n": rep.n, "s": rep.s, "leading": rep.leading,
                     "log_integral": rep.log_integral, "total": rep.total, "volK": rep.volK,
                     "cramer_ok": f.cramer_label})
    return ["family", "n", "s", "leading", "log_integral", "total", "volK", "cramer_ok"], rows


def compare_grid(dims, ns_explicit, n_min: int, n_max: int) -> list[tuple[int, int]]:
    cells = []
    for d in dims:
        if d < 2:
            raise ConfigError("compare needs d >= 2")
        if ns_explicit:
            bad = [n for n in ns_explicit if n < d]
            if bad:
                raise ConfigError(f"n={bad[0]} < d={d}: under-determined model has no exact value")
            cells.extend((d, n) for n in ns_explicit)
        else:
            cells.extend((d, n) for n in range(max(d, n_min), n_max + 1))
    return sorted(set(cells))


def cmd_compare(args) -> tuple[list[str], list[dict]]:
    dims = range(args.d_min, args.d_max + 1)
    cells = compare_grid(dims, args.n, args.n_min, args.n_max)
    f1_by_d = {d: spherical_f1_closed_form(d) for d in dims} if args.closed_form_f1 else {}

    def run(cell):
        d, n = cell
        s0, s1 = overestimation(d, n, f1_by_d.get(d))
        return {"d": d, "n": n, "over_s0": s0, "over_s1": s1}

    if not args.closed_form_f1:
        # one expansion evaluation per dimension, shared by every n
        from .expansion import f1 as f1_numeric
        from .family import spherical_normal

        for d in dims:
            fam = spherical_normal(d)
            f1_by_d[d] = f1_numeric(fam, default_point(fam))
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(run, cells))
    rows.sort(key=lambda r: (r["d"], r["n"]))
    return ["d", "n", "over_s0", "over_s1"], rows


def cmd_validate(args) -> tuple[list[str], list[dict]]:
    checks = run_suite(args.suite, args.seed)
    rows = [{"suite": c.suite, "check": c.name, "passed": bool(c.passed), "value": float(c.value),
             "expected": float(c.expected), "tolerance": float(c.tolerance)} for c in checks]
    return ["suite", "check", "passed", "value", "expected", "tolerance"], rows


def _family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=CATALOG_NAMES + ("poly",), default="exp1d")
    p.add_argument("--dim", type=int, default=None, help="dimension d of the parameter space")
    p.add_argument("--sigma", type=float, default=1.0, help="known noise scale for normal-kv")
    p.add_argument("--poly-json", default=None, help="polynomial log-partition family (JSON)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parcomp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, default=42)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="F0, F1, F2 at parameter points")
    _family_args(p)
    p.add_argument("--theta", action="append",
                   help="natural parameter point, comma-separated (write --theta=-1,2 when it starts with a minus); repeatable")
    p.add_argument("--order", type=int, choices=(0, 1, 2), default=2)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("complexity", parents=[common], help="asymptotic COMP(K) over a box")
    _family_args(p)
    p.add_argument("--box", nargs=2, type=float, action="append", metavar=("LO", "HI"),
                   help="one side of the box per dimension, in natural coordinates")
    p.add_argument("--n", type=int, action="append", required=True, help="sample size; repeatable")
    p.add_argument("--s", type=int, choices=(0, 1, 2), default=1, help="expansion order")
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="Gauss-Legendre nodes per dimension")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("compare", parents=[common],
                       help="overestimation of exact COMP by the s=0 and s=1 formulas (spherical normal)")
    p.add_argument("--d-min", type=int, default=2)
    p.add_argument("--d-max", type=int, default=11)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=200)
    p.add_argument("--n", type=int, action="append", help="explicit sample sizes (must be >= d)")
    p.add_argument("--closed-form-f1", action="store_true",
                   help="use (1 - 3d^2)/(12(d-1)) instead of evaluating F1 from cumulants")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", parents=[common], help="run oracle suites")
    p.add_argument("--suite", choices=("hermite", "ac", "exp-oracle", "all"), default="all")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        columns, rows = args.func(args)
    except ConfigError as exc:
        print(f"parcomp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, DegenerateMetricError, DerivativeOrderError, ExpansionInvalidError,
            ArithmeticError) as exc:
        print(f"parcomp: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"parcomp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.output:
        with open(args.output, "w", newline="") as fh:
            emit(args.command, columns, rows, args.format, fh)
    else:
        emit(args.command, columns, rows, args.format, sys.stdout)
    if args.command == "validate" and not all(r["passed"] for r in rows):
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
