"""Command-line front end.

Subcommands: ``gamma-table``, ``beta``, ``discretize``, ``resolvent``,
``solve``, ``certify`` and ``validate``. Kernel and signal specs are JSON
files; numeric output is CSV with ``#``-prefixed metadata lines.

Exit status: 0 on success, 1 on usage or configuration errors, 2 when
``validate`` finds a certificate violated.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import certificates, coefficients, kernels, oracle, resolvent, solver
from .exceptions import VolresError
from .gamma import GammaEvaluator


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    kernel: str | None = None
    delta: float | None = None
    horizon: float | None = None
    tol: float | None = None
    grid: int | None = None
    signal: str | None = None
    out: str | None = None

    def __post_init__(self):
        for name in ("delta", "horizon", "tol"):
            v = getattr(self, name)
            if v is not None and not (v > 0.0 and math.isfinite(v)):
                raise UsageError(f"--{name} must be positive")
        if self.grid is not None and self.grid < 2:
            raise UsageError("--grid must be >= 2")


def fmt(x) -> str:
    return format(float(x), ".17g")


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header, columns, meta=()):
    lines = [f"# {k}: {v}" for k, v in meta]
    lines.append(",".join(header))
    for row in zip(*columns):
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _meta_value(v):
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _load_kernel(path):
    if path is None:
        raise UsageError("--kernel is required")
    try:
        return kernels.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read kernel file: {exc}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad kernel spec: {exc}") from exc


def _load_signal(path):
    if path is None:
        raise UsageError("--signal is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return solver.from_dict(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read signal file: {exc}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad signal spec: {exc}") from exc


def _build(cfg):
    spec = _load_kernel(cfg.kernel)
    pk = kernels.discretize(spec, cfg.delta, cfg.horizon)
    res = resolvent.build(pk, cfg.horizon, cfg.tol)
    cert = certificates.kernel_certificate(spec, cfg.delta, cfg.horizon, pk=pk)
    return spec, pk, res, cert


def _resolvent_meta(res, cert):
    return [
        ("delta", fmt(res.delta)),
        ("horizon", fmt(res.horizon)),
        ("k_eff", fmt(res.k_eff)),
        ("N", res.N),
        ("tail_bound_sup", fmt(res.tail_bound_sup)),
        ("kernel_error_sup", fmt(cert.kernel_error)),
        ("k_bound", fmt(cert.k_bound)),
        ("discretization_certificate_sup", fmt(cert.resolvent_error)),
    ]


def cmd_gamma_table(args):
    ev = GammaEvaluator()
    ns, ts, vals = [], [], []
    for n in range(1, args.n + 1):
        t = np.linspace(0.0, float(n), args.grid)
        ns += [str(n)] * t.size
        ts.append(t)
        vals.append(ev(n, t))
    _write(_csv(["n", "t", "gamma"], [ns, np.concatenate(ts), np.concatenate(vals)]), args.out)
    return 0


def cmd_beta(args):
    cfg = RunConfig("beta", kernel=args.kernel, delta=args.delta, horizon=args.horizon)
    spec = _load_kernel(cfg.kernel)
    pk = kernels.discretize(spec, cfg.delta, cfg.horizon)
    R = max(0, math.ceil(cfg.horizon / cfg.delta - 1e-10))
    tri = coefficients.build_triangle(np.asarray(pk.betas)[:R + 1] * pk.delta, args.depth, R)
    meta = [("k_eff", fmt(tri.k_eff)), ("N", tri.N), ("R", tri.R)]
    for n in range(1, tri.N + 1):
        mass, exact = coefficients.mass_check(tri, n)
        meta.append((f"row {n} mass", f"{fmt(mass)} k_eff^n={fmt(tri.k_eff ** n)} "
                     f"{'exact' if exact else 'lower_bound'}"))
    n_col, r_col, b_col = [], [], []
    for n in range(1, tri.N + 1):
        for r, b in enumerate(tri.row(n)):
            n_col.append(str(n))
            r_col.append(str(r))
            b_col.append(b)
    _write(_csv(["n", "r", "beta"], [n_col, r_col, b_col], meta), args.out)
    return 0


def cmd_discretize(args):
    cfg = RunConfig("discretize", kernel=args.kernel, delta=args.delta, horizon=args.horizon)
    spec = _load_kernel(cfg.kernel)
    pk = kernels.discretize(spec, cfg.delta, cfg.horizon)
    _write(json.dumps(kernels.to_dict(pk)) + "\n", args.out)
    return 0


def cmd_resolvent(args):
    cfg = RunConfig("resolvent", kernel=args.kernel, delta=args.delta, horizon=args.horizon,
                    tol=args.tol, grid=args.grid, out=args.out)
    _, _, res, cert = _build(cfg)
    t = np.linspace(0.0, cfg.horizon, cfg.grid)
    _write(_csv(["t", "h"], [t, res(t)], _resolvent_meta(res, cert)), cfg.out)
    return 0


def cmd_solve(args):
    cfg = RunConfig("solve", kernel=args.kernel, delta=args.delta, horizon=args.horizon,
                    tol=args.tol, grid=args.grid, signal=args.signal, out=args.out)
    sig = _load_signal(cfg.signal)
    _, _, res, cert = _build(cfg)
    grid = np.linspace(0.0, cfg.horizon, cfg.grid)
    sol = solver.solve(res, sig, grid)
    f_mass = solver.signal_l1(sig, cfg.horizon, grid)
    scert = certificates.solution_certificate(cert, f_mass, window_T=cfg.horizon)
    meta = _resolvent_meta(res, cert) + [
        ("signal_mass", fmt(f_mass)),
        ("solution_certificate_sup", fmt(scert.solution_error)),
    ]
    if cfg.out is None:
        meta += [("atom", f"{fmt(t)},{fmt(w)}") for t, w in sol.atoms]
    _write(_csv(["t", "y_regular"], [grid, sol.regular_samples], meta), cfg.out)
    if cfg.out is not None:
        atoms = sol.atoms
        _write(_csv(["t", "w"], [[a[0] for a in atoms], [a[1] for a in atoms]]),
               cfg.out + ".atoms.csv")
    return 0


def cmd_certify(args):
    cfg = RunConfig("certify", kernel=args.kernel, delta=args.delta, horizon=args.horizon)
    spec = _load_kernel(cfg.kernel)
    cert = certificates.kernel_certificate(spec, cfg.delta, cfg.horizon)
    if args.f_mass is not None:
        cert = certificates.solution_certificate(cert, args.f_mass, window_T=cfg.horizon)
    _write(json.dumps(cert.as_dict(), indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_validate(args):
    cfg = RunConfig("validate", kernel=args.kernel, delta=args.delta, horizon=args.horizon,
                    tol=args.tol)
    spec, pk, res, cert = _build(cfg)
    g = lambda t: kernels.evaluate(spec, t)  # noqa: E731
    g_left = lambda t: kernels.evaluate(spec, t, side="left")  # noqa: E731
    coarse = oracle.solve_volterra_direct(g, args.step, cfg.horizon, g_left=g_left)
    fine = oracle.solve_volterra_direct(g, args.step / 2, cfg.horizon, g_left=g_left)
    quad_est = float(np.max(np.abs(fine.values[::2] - coarse.values))) * 4.0 / 3.0
    t = fine.t
    pipe = 0.5 * (res(t) + res(t, side="left"))
    pipe[0] = res(0.0)
    diff = np.abs(pipe - fine.values)
    sup = float(diff.max())
    l1 = float(np.sum(diff[1:] + diff[:-1]) * 0.5 * fine.step)
    allowed = cert.resolvent_error + res.tail_bound_sup + quad_est
    ok = sup <= allowed
    report = {
        "sup_discrepancy": sup,
        "l1_discrepancy": l1,
        "certificate_sup": cert.resolvent_error,
        "tail_bound_sup": res.tail_bound_sup,
        "oracle_quadrature_estimate": quad_est,
        "allowed_sup": allowed,
        "N": res.N,
        "k_eff": res.k_eff,
        "pass": ok,
    }
    _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return 0 if ok else 2


def make_parser():
    p = _Parser(prog="volres", description="Resolvent kernels of Volterra equations "
                "with piecewise-constant kernels.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, tol=True):
        sp.add_argument("--kernel", help="kernel spec JSON file")
        sp.add_argument("--delta", type=float, required=True)
        sp.add_argument("--horizon", type=float, required=True)
        if tol:
            sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--out", help="output file (default: stdout)")

    sp = sub.add_parser("gamma-table", help="tabulate gamma_n for n = 1..N")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--grid", type=int, default=301)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gamma_table)

    sp = sub.add_parser("beta", help="coefficient triangle beta[n][r]")
    common(sp, tol=False)
    sp.add_argument("--depth", type=int, default=10)
    sp.set_defaults(func=cmd_beta)

    sp = sub.add_parser("discretize", help="write the step kernel as tabulated JSON")
    common(sp, tol=False)
    sp.set_defaults(func=cmd_discretize)

    sp = sub.add_parser("resolvent", help="evaluate h_delta on a grid")
    common(sp)
    sp.add_argument("--grid", type=int, default=501)
    sp.set_defaults(func=cmd_resolvent)

    sp = sub.add_parser("solve", help="solve y = f + h * f for a signal")
    common(sp)
    sp.add_argument("--grid", type=int, default=501)
    sp.add_argument("--signal", help="signal spec JSON file")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("certify", help="print the error certificate as JSON")
    common(sp, tol=False)
    sp.add_argument("--f-mass", type=float, dest="f_mass")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("validate", help="compare the pipeline against the quadrature oracle")
    common(sp)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.set_defaults(func=cmd_validate)
    return p


def run(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if getattr(args, "grid", 2) < 2 or getattr(args, "n", 1) < 1:
            raise UsageError("--grid must be >= 2 and --n >= 1")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (VolresError, ValueError, OSError) as exc:
        print(f"volres: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
