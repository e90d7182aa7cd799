"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 mathematical precondition
violated, 4 invariant or acceptance check failed.
"""

import argparse
import csv
import io as _io
import json
import math
import sys

import numpy as np

from . import constants, hilbert, paths, spectral
from ._validation import check_random_state
from .exceptions import InputError, PreconditionError
from .geometry import angular_operator, as_projection, distance
from .io import dumps, load_matrix

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_INVARIANT = 0, 2, 3, 4


class InvariantFailure(Exception):
    """Raised by a subcommand after its result has been emitted."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _shared():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parent.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    parent.add_argument("--out", default=None, help="write output here instead of stdout")
    fmt = parent.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    parent.set_defaults(format="json")
    return parent


# -- output -------------------------------------------------------------------

def _scalar_row(record):
    return {k: v for k, v in record.items() if not isinstance(v, (dict, list))}


def _to_csv(rows):
    buf = _io.StringIO()
    fields = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _emit(args, record, rows=None):
    if args.format == "csv":
        text = _to_csv(rows if rows is not None else [_scalar_row(record)])
    else:
        text = dumps(record) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args, default):
    return default if args.tol is None else args.tol


# -- subcommands ----------------------------------------------------------------

def cmd_angle(args):
    P = as_projection(load_matrix(args.p), "p")
    Q = as_projection(load_matrix(args.q), "q")
    pair = angular_operator(P, Q)
    record = {"distance": pair.distance, "theta_norm": pair.theta_norm, "x_norm": pair.x_norm,
              "rho": paths.rho(P, Q).value}
    _emit(args, record)
    tol = _tol(args, 1e-8)
    if abs(math.sin(pair.theta_norm) - pair.distance) > tol or abs(math.tan(pair.theta_norm) - pair.x_norm) > tol * (
        1 + pair.x_norm
    ):
        raise InvariantFailure("norm identities violated")


def cmd_geodesic(args):
    P = as_projection(load_matrix(args.p), "p")
    Q = as_projection(load_matrix(args.q), "q")
    path = paths.geodesic(P, Q, samples=args.samples)
    report = paths.verify_arcsine_law(path) if len(path) > 2 else paths.LengthReport(
        paths.polygonal_length(path), 0.0 if len(path) == 1 else None,
        math.asin(min(1.0, distance(path.points[0], path.points[-1]))))
    record = {"length": report.to_dict(), "samples": len(path)}
    if not args.no_path:
        record["path"] = path.to_list()
    rows = [{"t": float(t), "distance_from_p": distance(path.points[0], pt)} for t, pt in zip(path.times, path.points)]
    _emit(args, record, rows)
    if report.riemannian is not None and abs(report.riemannian - report.endpoints_arcsin) > _tol(args, 1e-5):
        raise InvariantFailure("geodesic does not attain the arcsine bound")


def cmd_length(args):
    with open(args.path, encoding="utf-8") as fh:
        try:
            items = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.path}: invalid JSON ({exc})") from exc
    path = paths.ProjectionPath.from_list(items)
    if len(path) >= 3:
        report = paths.verify_arcsine_law(path)
    else:
        end = distance(path.points[0], path.points[-1])
        report = paths.LengthReport(paths.polygonal_length(path), None, math.asin(min(end, 1.0)))
    _emit(args, report.to_dict())
    if report.endpoints_arcsin > report.polygonal + _tol(args, paths.ARCSINE_TOL):
        raise InvariantFailure("arcsine law violated")


def _bound_trials(args, rng):
    offdiag = args.kind == "offdiag"
    critical = constants.c_star_value() if offdiag else spectral.DIAG_CRITICAL
    reports = []
    for _ in range(args.trials):
        n = int(rng.integers(2, args.n + 1))
        k = int(rng.integers(1, n))
        A, split = spectral.random_gapped_hermitian(n, k, 1.0, rng, interleave=offdiag and rng.random() < 0.5)
        norm_v = float(rng.uniform(0, critical))
        V = spectral.random_perturbation(A, split, norm_v, rng, offdiagonal=offdiag)
        pred = (spectral.offdiag_bound if offdiag else spectral.diag_bound)(norm_v, split.dist)
        actual = spectral.perturbed_projection_difference(A, V, split)
        reports.append(spectral.BoundReport(args.kind, pred.value, actual, pred.valid, pred.value - actual))
    return reports


def cmd_bound(args):
    rng = check_random_state(args.seed)
    tol = _tol(args, 1e-8)
    if args.kind in ("diag", "offdiag"):
        fn = spectral.offdiag_bound if args.kind == "offdiag" else spectral.diag_bound
        if args.trials:
            reports = _bound_trials(args, rng)
            worst = min(r.margin for r in reports)
            record = {"kind": args.kind, "trials": len(reports), "min_margin": worst,
                      "all_consistent": all(r.margin >= -tol for r in reports)}
            _emit(args, record, [r.to_dict() for r in reports])
            if not record["all_consistent"]:
                raise InvariantFailure("brute force exceeded the bound")
            return
        if args.ratio is not None:
            ratios = [args.ratio]
        else:
            hi = constants.c_star_value() if args.kind == "offdiag" else spectral.DIAG_CRITICAL
            ratios = list(np.linspace(0.0, hi, args.grid, endpoint=False))
        rows = []
        for a in ratios:
            pred = fn(float(a), 1.0)
            old = spectral.old_bounds(float(a), 1.0, offdiagonal=args.kind == "offdiag")
            rows.append({"ratio": float(a), "bound": pred.value, "valid": pred.valid,
                         "old_bound": old.value, "old_valid": old.valid})
        record = rows[0] if len(rows) == 1 else {"kind": args.kind, "table": rows}
        _emit(args, record, rows)
        return
    # integral bound along a linear path A + tV
    if args.a:
        A = load_matrix(args.a)
        V = load_matrix(args.v) if args.v else np.zeros_like(A)
        split = spectral.split_spectrum(A, args.gap)
    else:
        A, split = spectral.random_gapped_hermitian(args.n, max(1, args.n // 2), 1.0, rng)
        V = spectral.random_perturbation(A, split, args.ratio if args.ratio is not None else 0.3, rng)
    path = spectral.OperatorPath.linear(A, V, samples=args.samples)
    try:
        splits = spectral.track_components(path, split)
    except PreconditionError as exc:
        _emit(args, {"kind": "integral", "error": type(exc).__name__, "message": str(exc),
                     "time": getattr(exc, "time", None)})
        raise
    rep = spectral.integral_bound(path, splits, subordinated=args.subordinated)
    _emit(args, rep.to_dict())
    if rep.valid and rep.margin < -max(tol, 3 * rep.quad_error):
        raise InvariantFailure("integral bound violated")


def cmd_constants(args):
    cs = constants.compute_c_star(precision=args.precision)
    cp = constants.compute_c_pi()
    record = {"c_star": cs.to_dict(), "c_pi": cp.to_dict()}
    rows = [_scalar_row(cs.to_dict()) | {"lo": cs.bracket[0], "hi": cs.bracket[1]},
            _scalar_row(cp.to_dict()) | {"lo": cp.bracket[0], "hi": cp.bracket[1]}]
    _emit(args, record, rows)
    lo, hi = constants.C_STAR_BRACKET
    if not (lo < cs.value < hi and cp.value < cs.value):
        raise InvariantFailure("constants outside their stated brackets")
    if abs(cp.checks["root_residual"]) > _tol(args, 1e-12):
        raise InvariantFailure("c_pi does not solve its equation")


def cmd_verify(args):
    a = constants.verify_appendix_a(args.grid)
    b = constants.verify_appendix_b(args.grid)
    ok = a.ok and b.ok and b.extra["identity_error"] <= _tol(args, 1e-14)
    record = {"appendix_a": a.to_dict(), "appendix_b": b.to_dict(), "ok": ok}
    _emit(args, record, [_scalar_row(a.to_dict()), _scalar_row(b.to_dict())])
    if not ok:
        raise InvariantFailure("appendix inequality check failed")


def cmd_hilbert(args):
    if args.sweep:
        rows = hilbert.n_sweep(tuple(args.sweep), t=args.t if args.t is not None else math.pi / 4)
        _emit(args, {"sweep": rows}, rows)
        return
    if args.p is not None or args.m is not None:
        hp = hilbert.ToeplitzHp(args.p if args.p is not None else 0.5, args.m if args.m is not None else 2000)
        res = hilbert.hilbert_norm(hp, method=args.method)
        _emit(args, res.to_dict())
        if res.norm > res.limit + 1e-9:
            raise InvariantFailure("section norm exceeds the limit")
        if args.tol is not None and abs(res.gap) > args.tol * res.limit:
            raise InvariantFailure("section norm not within tolerance of the limit")
        return
    t = args.t if args.t is not None else math.pi / 4
    dev = hilbert.projection_path_deviation(hilbert.FourierModel(args.n), t)
    _emit(args, dev.to_dict())
    if dev.error > _tol(args, 1e-10):
        raise InvariantFailure("projection path deviates from sin t")


# -- entry point -------------------------------------------------------------------

def build_parser():
    shared = _shared()
    parser = _Parser(prog="projgeom", description="Geometry of orthogonal projections and subspace perturbation bounds.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("angle", parents=[shared], help="operator angle of a pair of projections")
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(func=cmd_angle)

    p = sub.add_parser("geodesic", parents=[shared], help="sampled geodesic and its length report")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--no-path", action="store_true", help="omit the sampled matrices")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("length", parents=[shared], help="length report of a path file [{t, matrix}, ...]")
    p.add_argument("path")
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("bound", parents=[shared], help="perturbation bounds")
    p.add_argument("--kind", choices=("diag", "offdiag", "integral"), default="diag")
    p.add_argument("--ratio", type=float, default=None, help="||V||/d")
    p.add_argument("--grid", type=int, default=21, help="table size when --ratio is not given")
    p.add_argument("--trials", type=int, default=0, help="Monte-Carlo trials against brute force")
    p.add_argument("--n", type=int, default=8, help="matrix size of random instances")
    p.add_argument("--a", default=None, help="matrix file for A (integral kind)")
    p.add_argument("--v", default=None, help="matrix file for V (integral kind)")
    p.add_argument("--gap", type=float, default=1e-8, help="gap threshold for splitting A")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--subordinated", action="store_true", help="use the constant 1")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("constants", parents=[shared], help="c_star and c_pi")
    p.add_argument("--precision", type=float, default=1e-12)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify", parents=[shared], help="appendix inequalities on a grid")
    p.add_argument("--grid", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hilbert", parents=[shared], help="Fourier model of the sharpness example")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--method", choices=("power", "svd"), default="power")
    p.add_argument("--sweep", type=int, nargs="+", default=None, metavar="N")
    p.set_defaults(func=cmd_hilbert)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InvariantFailure as exc:
        print(f"projgeom {args.command}: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InputError as exc:
        print(f"projgeom {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"projgeom {args.command}: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"projgeom {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
