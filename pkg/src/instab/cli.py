"""Command-line interface.

Exit codes: 0 success, 2 usage/parameter errors (including orbit classes a
computation does not support), 3 computation failures (no sign change, no
convergence, junction mismatch, threshold not found).

Output is JSON (``"schema": 1``) or CSV (mandatory header, 17 significant
digits, LF line endings) depending on --format; table-like subcommands
default to CSV, scalar ones to JSON.  Grid sweeps run on a thread pool whose
size is capped by the INSTAB_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .contfrac import DEFAULT_MAX_DEPTH
from .dispersion import DispersionSpec, default_lambda_cap, find_root, nu0_estimate, value
from .eigensystem import build_w
from .errors import InstabError
from .lattice import LatticeVector, canonical_rep, classify, enumerate_classes, wedge
from .models import FlowParams, ModelKind, recurrence_coeff
from .spectral import build_L, det_I_plus_K, det_root, growth_rate, max_real_eig

__all__ = ["run", "main"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse calls error() then sys.exit(2); raise instead so run() owns codes
    def error(self, message):
        raise UsageError(message)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated integers, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"expected integers in {text!r}") from None


def _max_workers() -> int:
    env = os.environ.get("INSTAB_THREADS")
    if env is None:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"INSTAB_THREADS must be a positive integer, got {env!r}") from None
    if n < 1:
        raise UsageError(f"INSTAB_THREADS must be a positive integer, got {env!r}")
    return n


def _emit_text(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_json(obj: dict, output: str | None) -> None:
    _emit_text(json.dumps(obj, indent=2) + "\n", output)


def _emit_csv(header: list[str], rows: list[tuple], output: str | None) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    _emit_text("\n".join(lines) + "\n", output)


def _params_from(args, *, require_nu: bool = True) -> FlowParams:
    nu = args.nu
    if nu is None:
        if require_nu:
            raise UsageError("--nu is required for this subcommand")
        nu = 1.0  # placeholder; the computation scans nu itself
    try:
        return FlowParams(
            model=ModelKind.from_tag(args.model),
            p=LatticeVector(*_parse_pair(args.p)),
            q=LatticeVector(*_parse_pair(args.q)),
            nu=nu,
            alpha=args.alpha,
            gamma=args.gamma,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _dispersion_spec(params: FlowParams) -> DispersionSpec:
    try:
        return DispersionSpec(params)
    except ValueError:
        raise UsageError(
            f"class not supported: dispersion takes orbit classes I0/I+/I-, "
            f"got {params.point_class.value!r}"
        ) from None


def _require_positive_nu(params: FlowParams) -> None:
    if params.nu == 0:
        raise UsageError("nu=0 (no dissipation) is supported only by `curve`")


def _grid(lo: float | None, hi: float | None, step: float | None,
          what: str) -> list[float]:
    if lo is None or hi is None or step is None:
        raise UsageError(f"{what} grid needs --{what}-min, --{what}-max and --step")
    if step <= 0:
        raise UsageError("--step must be positive")
    count = int(math.floor((hi - lo) / step + 1e-12)) + 1
    if count < 1:
        raise UsageError(f"empty {what} grid: max is below min")
    return [lo + i * step for i in range(count)]


def _fixed_depth(args) -> int | None:
    return getattr(args, "depth", None)


def _max_depth(args) -> int:
    cap = getattr(args, "depth_cap", None)
    if cap is None:
        return DEFAULT_MAX_DEPTH
    if cap < 2:
        raise UsageError("--depth-cap must be at least 2")
    return cap


def _flow_meta(params: FlowParams) -> dict:
    meta = {
        "model": params.model.value,
        "p": [params.p.x, params.p.y],
        "q": [params.q.x, params.q.y],
        "class": params.point_class.value,
        "nu": params.nu,
    }
    if params.alpha is not None:
        meta["alpha"] = params.alpha
    if params.gamma is not None:
        meta["gamma"] = params.gamma
    return meta


# ---------------------------------------------------------------- subcommands


def _cmd_classify(args) -> int:
    p = LatticeVector(*_parse_pair(args.p))
    if (args.q is None) == (args.radius is None):
        raise UsageError("classify needs exactly one of --q or --radius")
    if args.radius is not None:
        if args.radius <= 0:
            raise UsageError("--radius must be positive")
        orbits = enumerate_classes(p, args.radius)
        if args.format == "json":
            _emit_json({
                "schema": 1,
                "p": [p.x, p.y],
                "radius": args.radius,
                "orbits": [
                    {"rep": [rep.rep.x, rep.rep.y], "class": cls.value}
                    for rep, cls in orbits
                ],
            }, args.output)
        else:
            _emit_csv(["rep_x", "rep_y", "class"],
                      [(rep.rep.x, rep.rep.y, cls.value) for rep, cls in orbits],
                      args.output)
        return 0
    q = LatticeVector(*_parse_pair(args.q))
    rep = canonical_rep(q, p)
    cls = classify(q, p)
    if args.format == "json":
        _emit_json({
            "schema": 1,
            "p": [p.x, p.y],
            "q": [q.x, q.y],
            "rep": [rep.rep.x, rep.rep.y],
            "shift": rep.shift,
            "wedge": wedge(p, q),
            "class": cls.value,
        }, args.output)
    else:
        _emit_csv(["q_x", "q_y", "rep_x", "rep_y", "shift", "class"],
                  [(q.x, q.y, rep.rep.x, rep.rep.y, rep.shift, cls.value)],
                  args.output)
    return 0


def _cmd_root(args) -> int:
    params = _params_from(args)
    _require_positive_nu(params)
    spec = _dispersion_spec(params)
    result = find_root(spec, tol=args.tol, lambda_cap=args.lambda_cap,
                       depth=_fixed_depth(args), max_depth=_max_depth(args))
    if not result.found:
        sys.stderr.write(f"error: {result.diagnostic}\n")
        return 3
    payload = {"schema": 1, **_flow_meta(params),
               "lambda": result.lam,
               "bracket": list(result.bracket),
               "residual": result.dispersion_residual,
               "cf_depth": result.cf_depth}
    if args.format == "csv":
        _emit_csv(["lambda", "bracket_lo", "bracket_hi", "residual", "cf_depth"],
                  [(result.lam, result.bracket[0], result.bracket[1],
                    result.dispersion_residual, result.cf_depth)], args.output)
    else:
        _emit_json(payload, args.output)
    return 0


def _cmd_nu0(args) -> int:
    params = _params_from(args, require_nu=False)
    _dispersion_spec(params)
    nu0 = nu0_estimate(params, tol=args.tol, nu_cap=args.nu_cap,
                       max_depth=_max_depth(args))
    meta = _flow_meta(params)
    if args.nu is None:
        del meta["nu"]  # nu is the unknown here, not an input
    if args.format == "csv":
        _emit_csv(["nu0"], [(nu0,)], args.output)
    else:
        _emit_json({"schema": 1, **meta, "nu0": nu0}, args.output)
    return 0


def _cmd_eigvec(args) -> int:
    params = _params_from(args)
    _require_positive_nu(params)
    spec = _dispersion_spec(params)
    lam = args.lam
    if lam is None:
        root = find_root(spec, tol=min(args.tol, 1e-10), max_depth=_max_depth(args))
        if not root.found:
            sys.stderr.write(f"error: {root.diagnostic}\n")
            return 3
        lam = root.lam
    result = build_w(lam, params, args.window, tol=args.tol,
                     match_tol=args.match_tol, max_depth=_max_depth(args))
    ns = sorted(result.w)
    if args.format == "json":
        _emit_json({
            "schema": 1, **_flow_meta(params),
            "lambda": result.lam,
            "window": result.window,
            "residual": result.residual,
            "decay_rate": result.decay_rate,
            "decay_r2": result.decay_r2,
            "sign_ok": result.sign_ok,
            "n": ns,
            "w": [result.w[n] for n in ns],
        }, args.output)
    else:
        _emit_csv(["n", "w"], [(n, result.w[n]) for n in ns], args.output)
    return 0


def _cmd_det(args) -> int:
    params = _params_from(args)
    _require_positive_nu(params)
    N = args.window
    if args.root_bracket is not None:
        parts = args.root_bracket.split(",")
        if len(parts) != 2:
            raise UsageError("--root-bracket expects lo,hi")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise UsageError("--root-bracket expects numbers lo,hi") from None
        try:
            root = det_root(params, N, (lo, hi), tol=args.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.format == "csv":
            _emit_csv(["det_root", "n"], [(root, N)], args.output)
        else:
            _emit_json({"schema": 1, **_flow_meta(params),
                        "det_root": root, "N": N}, args.output)
        return 0
    if args.lam is not None:
        if args.lambda_min is not None or args.lambda_max is not None:
            raise UsageError("pass either --lam or a lambda grid, not both")
        grid = [args.lam]
    else:
        grid = _grid(args.lambda_min, args.lambda_max, args.step, "lambda")
    if any(x <= 0 for x in grid):
        raise UsageError("the determinant factorization needs lambda > 0")
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        samples = list(pool.map(lambda x: det_I_plus_K(x, params, N), grid))
    rows = [(s.lam, s.value, s.N) for s in samples]
    if args.format == "json":
        _emit_json({"schema": 1, **_flow_meta(params),
                    "columns": ["lambda", "det", "n"],
                    "rows": [list(r) for r in rows]}, args.output)
    else:
        _emit_csv(["lambda", "det", "n"], rows, args.output)
    return 0


def _cmd_simulate(args) -> int:
    params = _params_from(args)
    _require_positive_nu(params)
    dt = args.dt
    if dt is None:
        op = build_L(params, args.window)
        dt = 1.0 / (4.0 * float(max(abs(d) for d in op.diag)) + 4.0)
    try:
        slope = growth_rate(params, args.window, args.t_final, dt, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        _emit_csv(["slope", "n", "t_final", "dt", "seed"],
                  [(slope, args.window, args.t_final, dt, args.seed)], args.output)
    else:
        _emit_json({"schema": 1, **_flow_meta(params), "slope": slope,
                    "N": args.window, "t_final": args.t_final, "dt": dt,
                    "seed": args.seed}, args.output)
    return 0


def _cmd_curve(args) -> int:
    # a nu scan supplies its own viscosities, so --nu is optional there
    params = _params_from(args, require_nu=(args.scan == "lambda"))
    spec = _dispersion_spec(params)
    depth = _fixed_depth(args)
    max_depth = _max_depth(args)

    if args.scan == "lambda":
        lo = 0.0 if args.lambda_min is None else args.lambda_min
        hi = 2.0 if args.lambda_max is None else args.lambda_max
        grid = _grid(lo, hi, args.step, "lambda")
        if params.nu == 0 and grid[0] <= 0:
            raise UsageError("nu=0 needs a strictly positive lambda grid "
                             "(the recurrence degenerates at lambda=0)")

        def at(lam: float) -> tuple[float, float, float, float]:
            v = value(lam, spec, tol=args.tol, depth=depth, max_depth=max_depth)
            a0 = recurrence_coeff(0, lam, params)
            return (lam, -a0, v - a0, v)

        header = ["lambda", "minus_a0", "f_plus_g", "dispersion"]
    else:
        # any --nu that was passed is irrelevant: the grid replaces it
        grid = _grid(args.nu_min, args.nu_max, args.step, "nu")
        if grid[0] <= 0:
            raise UsageError("the nu grid must be strictly positive")

        def at(nu: float) -> tuple[float, float, float]:
            pr = dataclasses.replace(params, nu=nu)
            v = value(0.0, DispersionSpec(pr), tol=args.tol, depth=depth,
                      max_depth=max_depth)
            a0 = recurrence_coeff(0, 0.0, pr)
            return (nu, v - a0, -a0)

        header = ["nu", "h", "rhs"]

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        rows = list(pool.map(at, grid))
    if args.format == "json":
        meta = _flow_meta(params)
        if args.scan == "nu" and args.nu is None:
            del meta["nu"]  # nu is the scan variable, not an input
        _emit_json({"schema": 1, **meta, "columns": header,
                    "rows": [list(r) for r in rows]}, args.output)
    else:
        _emit_csv(header, rows, args.output)
    return 0


def _cmd_verify(args) -> int:
    params = _params_from(args)
    _require_positive_nu(params)
    spec = _dispersion_spec(params)
    N = args.window
    root = find_root(spec, tol=min(args.tol, 1e-10), max_depth=_max_depth(args))
    if not root.found:
        sys.stderr.write(f"error: {root.diagnostic}\n")
        return 3
    lam_cf = root.lam
    agree = args.agree_tol * max(1.0, lam_cf)

    lam_mx = max_real_eig(params, N)
    ok_mx = abs(lam_mx - lam_cf) <= agree

    # The determinant leg needs a trace-class K factor: its entries are
    # k_n*rho ~ rho_n/(nu*d_n).  For the second-grade model d_n is bounded
    # and rho_n -> 1, so the band entries do not decay and the sectioned
    # determinant diverges with N; the leg is skipped there.
    det_ok_defined = params.model is not ModelKind.SECOND_GRADE
    if det_ok_defined:
        det_at = det_I_plus_K(lam_cf, params, N).value
        ok_det_val = abs(det_at) <= args.det_tol
        lam_det = det_root(params, N, (0.9 * lam_cf, 1.1 * lam_cf), tol=0.25 * agree)
        ok_det_root = abs(lam_det - lam_cf) <= agree
    else:
        det_at = lam_det = None
        ok_det_val = ok_det_root = True

    passed = ok_mx and ok_det_val and ok_det_root
    if args.format == "json":
        _emit_json({
            "schema": 1, **_flow_meta(params), "N": N,
            "lambda_cf": lam_cf,
            "lambda_matrix": lam_mx,
            "det_at_root": det_at,
            "det_root": lam_det,
            "agree_tol": agree,
            "det_tol": args.det_tol,
            "pass": passed,
        }, args.output)
    else:
        lines = [
            f"lambda_cf     = {_fmt(lam_cf)}",
            f"lambda_matrix = {_fmt(lam_mx)}   |diff| = {abs(lam_mx - lam_cf):.3g}"
            f" <= {agree:.3g} : {'PASS' if ok_mx else 'FAIL'}",
        ]
        if det_ok_defined:
            lines += [
                f"det(I+K)      = {det_at:.3g}   |.| <= {args.det_tol:.3g} :"
                f" {'PASS' if ok_det_val else 'FAIL'}",
                f"det_root      = {_fmt(lam_det)}   |diff| = {abs(lam_det - lam_cf):.3g}"
                f" <= {agree:.3g} : {'PASS' if ok_det_root else 'FAIL'}",
            ]
        else:
            lines.append("det(I+K)      : skipped (band entries do not decay "
                         "for this model; determinant leg undefined)")
        lines.append(f"VERIFY: {'PASS' if passed else 'FAIL'}")
        _emit_text("\n".join(lines) + "\n", args.output)
    return 0 if passed else 3


# -------------------------------------------------------------------- parser


def _add_flow_args(sp, *, q_required: bool = True) -> None:
    sp.add_argument("--model", choices=[k.value for k in ModelKind], default="ns")
    sp.add_argument("--p", required=True, metavar="X,Y",
                    help="forcing wavevector (integers, e.g. 3,1)")
    sp.add_argument("--q", required=q_required, metavar="X,Y",
                    help="perturbation wavevector; use --q=-1,2 for negatives")
    sp.add_argument("--nu", type=float, default=None, help="viscosity")
    sp.add_argument("--alpha", type=float, default=None,
                    help="regularization length (required for non-ns models)")
    sp.add_argument("--gamma", type=float, default=None,
                    help="explicit steady amplitude (default: normalized scale)")


def _add_output_args(sp, default_format: str) -> None:
    sp.add_argument("--format", choices=["json", "csv"], default=default_format)
    sp.add_argument("--output", default=None, metavar="PATH",
                    help="write to a file instead of stdout")


def _add_depth_args(sp) -> None:
    sp.add_argument("--depth", type=int, default=None,
                    help="fixed truncation depth (default: adaptive)")
    sp.add_argument("--depth-cap", type=int, default=None,
                    help=f"adaptive depth cap (default {DEFAULT_MAX_DEPTH})")


def build_parser() -> _Parser:
    parser = _Parser(prog="instab",
                     description="Detect and certify linear instability of "
                                 "unidirectional flows via continued fractions, "
                                 "finite sections, determinants and simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", parents=[], help="orbit classification")
    sp.add_argument("--p", required=True, metavar="X,Y")
    sp.add_argument("--q", default=None, metavar="X,Y")
    sp.add_argument("--radius", type=float, default=None,
                    help="classify every orbit with a representative in this disk")
    _add_output_args(sp, "csv")
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("root", help="positive dispersion root (growth rate)")
    _add_flow_args(sp)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--lambda-cap", type=float, default=None)
    _add_depth_args(sp)
    _add_output_args(sp, "json")
    sp.set_defaults(func=_cmd_root)

    sp = sub.add_parser("nu0", help="largest viscosity with a zero-crossing at lambda=0")
    _add_flow_args(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--nu-cap", type=float, default=100.0)
    _add_depth_args(sp)
    _add_output_args(sp, "json")
    sp.set_defaults(func=_cmd_nu0)

    sp = sub.add_parser("eigvec", help="certified eigenvector on a window")
    _add_flow_args(sp)
    sp.add_argument("--lam", type=float, default=None,
                    help="eigenvalue candidate (default: solve for the root first)")
    sp.add_argument("--window", "-N", type=int, default=64)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--match-tol", type=float, default=None)
    _add_depth_args(sp)
    _add_output_args(sp, "csv")
    sp.set_defaults(func=_cmd_eigvec)

    sp = sub.add_parser("det", help="perturbation determinant samples or root")
    _add_flow_args(sp)
    sp.add_argument("--lam", type=float, default=None)
    sp.add_argument("--lambda-min", type=float, default=None)
    sp.add_argument("--lambda-max", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp.add_argument("--root-bracket", default=None, metavar="LO,HI",
                    help="bisect the determinant zero inside this bracket")
    sp.add_argument("--window", "-N", type=int, default=128)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_output_args(sp, "csv")
    sp.set_defaults(func=_cmd_det)

    sp = sub.add_parser("simulate", help="growth rate from time integration")
    _add_flow_args(sp)
    sp.add_argument("--window", "-N", type=int, default=16)
    sp.add_argument("--t-final", type=float, default=40.0)
    sp.add_argument("--dt", type=float, default=None,
                    help="time step (default: the explicit stability bound)")
    sp.add_argument("--seed", type=int, default=0)
    _add_output_args(sp, "json")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("curve", help="dispersion tables over a lambda or nu grid")
    _add_flow_args(sp)
    sp.add_argument("--scan", choices=["lambda", "nu"], default="lambda")
    sp.add_argument("--lambda-min", type=float, default=None)
    sp.add_argument("--lambda-max", type=float, default=None)
    sp.add_argument("--nu-min", type=float, default=None)
    sp.add_argument("--nu-max", type=float, default=None)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--tol", type=float, default=1e-10)
    _add_depth_args(sp)
    _add_output_args(sp, "csv")
    sp.set_defaults(func=_cmd_curve)

    sp = sub.add_parser("verify", help="cross-check a root against matrix and determinant oracles")
    _add_flow_args(sp)
    sp.add_argument("--window", "-N", type=int, default=128)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--agree-tol", type=float, default=1e-8)
    sp.add_argument("--det-tol", type=float, default=1e-6)
    _add_depth_args(sp)
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.add_argument("--output", default=None, metavar="PATH")
    sp.set_defaults(func=_cmd_verify)

    return parser


def run(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except InstabError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
