"""Command-line front end.

Every subcommand builds a complete report in memory, then writes it as CSV,
TSV or JSON.  Nothing is written if any row fails.

Exit codes: 0 success, 2 bad arguments, 3 solver failure, 4 internal
invariant violated.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bounds import gamma_c_bounds
from .operators import DEFAULT_TRUNCATION
from .profile import reconstruct_psi
from .solve import (
    EIG_TOL,
    BracketFailure,
    NotAttained,
    asymptotic_ratio,
    convergence_study,
    critical_gamma_via_k,
    feynman_hellmann,
    lambda_min,
    self_adjointness_threshold,
)
from .tridiag import NonConvergence

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4
THREADS_ENV = "CRITICAL_DIPOLE_THREADS"
MAX_DIM = 200
EIGENVECTOR_HEAD = 8


class InvariantViolation(RuntimeError):
    pass


@dataclass
class Report:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"meta": self.meta, "rows": self.rows}


# ---------------------------------------------------------------- formatting


def _round_value(v, digits):
    if digits is None or not isinstance(v, float):
        return v
    return round(v, digits)


def _text(v, digits):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if digits is not None:
            return f"{v:.{digits}f}"
        return repr(v)
    return str(v)


def render(report, fmt, digits=None):
    """Serialize a report; floats keep full (shortest round-trip) precision unless ``digits`` is set."""
    if fmt == "json":
        payload = {
            "meta": report.meta,
            "rows": [{k: _round_value(row[k], digits) for k in report.columns} for row in report.rows],
        }
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    delimiter = {"csv": ",", "tsv": "\t"}[fmt]
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_text(row[k], digits) for k in report.columns])
    return buf.getvalue()


# ---------------------------------------------------------------- parsing


def _int_range(text):
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer range A..B, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _float_range(text):
    try:
        a, b = text.split("..", 1)
        lo, hi = float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real range A..B, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return lo, hi


def _int_list(text):
    try:
        if ".." in text:
            return _int_range(text)
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list or A..B, got {text!r}") from None


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text!r}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--truncation", "-m", type=int, default=DEFAULT_TRUNCATION,
                        help="matrix truncation size (default %(default)s)")
    common.add_argument("--tol", type=_positive_float, default=EIG_TOL,
                        help="eigenvalue tolerance (default %(default)s)")
    common.add_argument("--format", choices=("csv", "json", "tsv"), default="csv")
    common.add_argument("--round", type=int, default=None, metavar="K",
                        help="round floating-point output to K decimals")
    common.add_argument("--output", default=None, metavar="PATH", help="write to PATH instead of stdout")

    parser = argparse.ArgumentParser(
        prog="critical-dipole",
        description="Critical dipole coupling constants and angular ground states in n >= 3 dimensions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="critical couplings with analytic bounds")
    p.add_argument("--dims", type=_int_range, default=list(range(3, 11)), metavar="A..B")

    p = sub.add_parser("lambda", parents=[common], help="angular ground state at one coupling")
    p.add_argument("--dim", "-n", type=int, required=True)
    p.add_argument("--gamma", type=_nonneg_float, required=True)

    p = sub.add_parser("scan", parents=[common], help="ground-state energy over a coupling range")
    p.add_argument("--dim", "-n", type=int, required=True)
    p.add_argument("--gamma-range", type=_float_range, required=True, metavar="A..B")
    p.add_argument("--steps", type=int, default=11)

    p = sub.add_parser("bounds", parents=[common], help="analytic bracket for the critical coupling")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dim", "-n", type=int)
    g.add_argument("--dims", type=_int_range, metavar="A..B")

    p = sub.add_parser("convergence", parents=[common], help="critical coupling against truncation size")
    p.add_argument("--dim", "-n", type=int, required=True)
    p.add_argument("--m-list", type=_int_list, default=[2, 3, 4, 5, 6, 7, 8, 16, 32],
                   help="comma list or A..B of truncations")

    p = sub.add_parser("profile", parents=[common], help="sampled angular ground state Psi(theta)")
    p.add_argument("--dim", "-n", type=int, required=True)
    p.add_argument("--gamma", type=_nonneg_float, required=True)
    p.add_argument("--grid", type=int, default=512)

    p = sub.add_parser("asymptotics", parents=[common], help="large-n behaviour of the critical coupling")
    p.add_argument("--dims", type=_int_range, default=list(range(5, 61)), metavar="A..B")

    p = sub.add_parser("threshold", parents=[common],
                       help="coupling where essential self-adjointness is lost")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dim", "-n", type=int)
    g.add_argument("--dims", type=_int_range, metavar="A..B")
    return parser


def _workers():
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if k < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {k}")
    return k or (os.cpu_count() or 1)


def _map_ordered(fn, items):
    items = list(items)
    workers = min(_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _meta(args, **extra):
    meta = {"version": __version__, "command": args.command, "m": args.truncation, "tol": args.tol}
    meta.update(extra)
    return meta


def _check_dims(parser, dims, low=3):
    for n in dims:
        if not low <= n <= MAX_DIM:
            parser.error(f"dimension {n} outside [{low}, {MAX_DIM}]")


# ---------------------------------------------------------------- commands


def cmd_table(args):
    m = args.truncation

    def row(n):
        rep = gamma_c_bounds(n)
        g = critical_gamma_via_k(n, m).gamma_c
        g_prev = critical_gamma_via_k(n, m - 1).gamma_c
        if not (rep.hardy_floor <= g and rep.contains(g)):
            raise InvariantViolation(f"gamma_c={g!r} for n={n} escapes its analytic bracket")
        return {
            "n": n,
            "lower_bound": rep.gamma_lower,
            "gamma_c": g,
            "upper_bound": rep.gamma_upper,
            "hardy_floor": rep.hardy_floor,
            "truncation_m": m,
            "converged_delta": abs(g - g_prev),
        }

    rows = _map_ordered(row, args.dims)
    cols = ["n", "lower_bound", "gamma_c", "upper_bound", "hardy_floor", "truncation_m", "converged_delta"]
    return Report(cols, rows, _meta(args))


def cmd_lambda(args):
    n, gamma, m = args.dim, args.gamma, args.truncation
    res = lambda_min(n, gamma, m, args.tol)
    if gamma > 0:
        fd, fh = feynman_hellmann(n, gamma, m, min(1e-4, 0.5 * gamma))
    else:
        fd = fh = 0.0  # lambda is even in gamma
    row = {
        "n": n,
        "gamma": float(gamma),
        "m": m,
        "lambda": res.lam,
        "lower_bound": res.lower,
        "upper_bound": res.upper,
        "dlambda_fd": fd,
        "dlambda_fh": fh,
        "residual": res.residual,
    }
    head = min(EIGENVECTOR_HEAD, m)
    for k in range(head):
        row[f"d{k}"] = float(res.vector[k])
    cols = list(row)
    return Report(cols, [row], _meta(args))


def cmd_scan(args):
    n, m = args.dim, args.truncation
    lo, hi = args.gamma_range
    gammas = [float(g) for g in np.linspace(lo, hi, args.steps)]

    def row(g):
        res = lambda_min(n, g, m, args.tol)
        return {"gamma": g, "lambda": res.lam, "lower_bound": res.lower, "upper_bound": res.upper}

    rows = _map_ordered(row, gammas)
    lams = [r["lambda"] for r in rows]
    if any(b >= a for a, b in zip(lams, lams[1:])):
        raise InvariantViolation(f"lambda(gamma) is not strictly decreasing on the scan for n={n}")
    return Report(["gamma", "lambda", "lower_bound", "upper_bound"], rows, _meta(args, n=n))


def cmd_bounds(args):
    rows = []
    for n in args.dims:
        rep = gamma_c_bounds(n)
        rows.append({
            "n": n,
            "lower_bound": rep.gamma_lower,
            "upper_bound": rep.gamma_upper,
            "hardy_floor": rep.hardy_floor,
        })
    return Report(["n", "lower_bound", "upper_bound", "hardy_floor"], rows, _meta(args))


def cmd_convergence(args):
    study = convergence_study(args.dim, args.m_list)
    rows = [{"m": r.m, "gamma_c": r.gamma_c, "delta": r.delta} for r in study]
    return Report(["m", "gamma_c", "delta"], rows, _meta(args, n=args.dim))


def cmd_profile(args):
    s = reconstruct_psi(args.dim, args.gamma, args.truncation, args.grid)
    rows = [{"theta": float(t), "psi": float(p)} for t, p in zip(s.theta, s.psi)]
    meta = _meta(
        args,
        n=s.n,
        gamma=s.gamma,
        **{"lambda": s.lam},
        weighted_norm=s.weighted_norm,
        ode_residual_linf=None if math.isnan(s.ode_residual_linf) else s.ode_residual_linf,
    )
    return Report(["theta", "psi"], rows, meta)


def cmd_asymptotics(args):
    study = asymptotic_ratio(args.dims, args.truncation)
    rows = [
        {"n": r.n, "gamma_c": r.gamma_c, "ratio": r.ratio, "reciprocal": r.reciprocal}
        for r in study.rows
    ]
    meta = _meta(
        args,
        c0_estimate=study.c0_estimate,
        c0_label="ESTIMATE",
        ratio_decreasing=study.ratio_decreasing,
        reciprocal_decreasing=study.reciprocal_decreasing,
    )
    note = f"C0 ESTIMATE (gamma_c/((n-2)(n-4)) at n={study.rows[-1].n}): {study.c0_estimate!r}"
    return Report(["n", "gamma_c", "ratio", "reciprocal"], rows, meta, [note])


def cmd_threshold(args):
    m = args.truncation

    def row(n):
        target = -n * (n - 4) / 4.0
        res = self_adjointness_threshold(n, m)
        g_c = critical_gamma_via_k(n, m).gamma_c
        if isinstance(res, NotAttained):
            return {"n": n, "target_lambda": target, "attained": False, "gamma_threshold": None, "gamma_c": g_c}
        return {"n": n, "target_lambda": target, "attained": True, "gamma_threshold": res.gamma_c, "gamma_c": g_c}

    rows = _map_ordered(row, args.dims)
    cols = ["n", "target_lambda", "attained", "gamma_threshold", "gamma_c"]
    return Report(cols, rows, _meta(args))


COMMANDS = {
    "table": cmd_table,
    "lambda": cmd_lambda,
    "scan": cmd_scan,
    "bounds": cmd_bounds,
    "convergence": cmd_convergence,
    "profile": cmd_profile,
    "asymptotics": cmd_asymptotics,
    "threshold": cmd_threshold,
}


def _validate(parser, args):
    if args.truncation < 2:
        parser.error("--truncation must be >= 2")
    if args.round is not None and args.round < 0:
        parser.error("--round must be >= 0")
    cmd = args.command
    if cmd in ("bounds", "threshold"):
        if args.dims is None:
            args.dims = [args.dim if args.dim is not None else 3]
        _check_dims(parser, args.dims)
    elif cmd == "table":
        if args.truncation < 3:
            parser.error("table needs --truncation >= 3 for the convergence column")
        _check_dims(parser, args.dims)
    elif cmd == "asymptotics":
        _check_dims(parser, args.dims, low=5)
    else:
        _check_dims(parser, [args.dim])
    if cmd == "threshold" and args.truncation < 8:
        parser.error("threshold needs --truncation >= 8")
    if cmd == "scan" and args.steps < 2:
        parser.error("--steps must be >= 2")
    if cmd == "profile" and args.grid < 16:
        parser.error("--grid must be >= 16")
    if cmd == "convergence":
        ms = args.m_list
        if not ms or ms[0] < 2 or any(b <= a for a, b in zip(ms, ms[1:])):
            parser.error("--m-list must be strictly increasing integers >= 2")
    try:
        _workers()
    except ValueError as exc:
        parser.error(str(exc))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        report = COMMANDS[args.command](args)
    except (NonConvergence, BracketFailure) as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    text = render(report, args.format, args.round)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for note in report.notes:
        print(note, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
