"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import pde
from . import profiles as pf
from . import scalar
from .errors import BracketError, ConvergenceError, DomainError
from .hyperbolic import Chart, write_disk_csv
from .verify import SweepConfig, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _fmt(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _ensure_dir(path):
    if path:
        os.makedirs(path, exist_ok=True)


def _dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------


def cmd_profile(args):
    shape = {"strip": args.l, "hypercycle": args.r, "nodoid": args.rho}[args.family]
    if shape is None:
        flag = {"strip": "--l", "hypercycle": "--r", "nodoid": "--rho"}[args.family]
        raise DomainError(f"{args.family} profile needs {flag}")
    params = pf.BarrierParams(args.H, args.family, shape)
    curve = pf.sample_profile(params, n=args.samples)
    base = args.out or f"profile_{args.family}"
    _ensure_dir(os.path.dirname(base))
    if "csv" in args.format:
        curve.write_csv(base + ".csv")
    if "json" in args.format:
        curve.write_json(base + ".json")
    print(f"{args.family} H={args.H} shape={shape}: height={curve.height!r} "
          f"argmax_d={curve.argmax_d!r} d_max={curve.d_max!r}")
    return EXIT_OK


def _load_config(args):
    overrides = {
        "H_grid": args.H_grid, "r_grid": args.r_grid, "rho_grid": args.rho_grid,
        "l_grid": args.l_grid, "output_dir": args.out,
    }
    if args.config:
        return SweepConfig.from_json(args.config, **overrides)
    return SweepConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_verify(args):
    cfg = _load_config(args)
    report = run_verification(cfg)
    _ensure_dir(cfg.output_dir)
    if "json" in cfg.formats:
        with open(os.path.join(cfg.output_dir, "verification.json"), "w", encoding="utf-8") as fh:
            fh.write(report.dumps() + "\n")
    if "csv" in cfg.formats:
        report.write_csv(os.path.join(cfg.output_dir, "verification.csv"))
    s = report.summary
    print(f"verification: {s['passed']}/{s['total']} passed, {s['failed']} failed")
    for e in report.entries:
        if not e.passed:
            print(f"  FAIL {e.property_id} [{e.paper_ref}] {e.params} margin={e.margin!r} {e.error}")
    return EXIT_OK if report.ok else EXIT_VERIFY


def _scenario(args):
    if args.chart == "strip":
        return pde.strip_scenario(args.H, args.l)
    if args.H <= 0:
        raise DomainError("annulus scenario needs H in (0, 1/2)")
    return pde.annulus_scenario(args.H, args.rho, args.d1, args.d2)


def cmd_solve(args):
    scn = _scenario(args)
    out = args.out or "."
    _ensure_dir(out)
    kw = {"tol": args.tol}
    if args.levels > 1:
        levels = [32 * 2**k + 1 for k in range(args.levels)]
        study = pde.convergence_study(scn, levels, **kw)
        _dump(study.to_json_dict(), os.path.join(out, f"convergence_{scn.name}.json"))
        print(f"{'n':>6} {'spacing':>12} {'max_error':>12} {'order':>7}")
        for k, (n, h, e, _) in enumerate(study.rows):
            order = f"{study.orders[k - 1]:.3f}" if k else ""
            print(f"{n:>6} {h:>12.5g} {e:>12.5g} {order:>7}")
        return EXIT_OK
    grid, report, err = pde.solve_scenario(scn, args.n, **kw)
    data = report.to_json_dict()
    data.update({"scenario": scn.name, "n": args.n, "max_error": err,
                 "meta": scn.meta})
    _dump(data, os.path.join(out, f"solve_{scn.name}.json"))
    grid.write_csv(os.path.join(out, f"solve_{scn.name}_field.csv"))
    if args.disk:
        grid.write_disk_csv(os.path.join(out, f"solve_{scn.name}_disk.csv"))
    print(f"{scn.name}: converged={report.converged} iters={report.newton_iters} "
          f"residual={report.residual_norm:.3e} max_u={report.max_u!r} max_error={err:.3e}")
    return EXIT_OK if report.converged else EXIT_NUMERIC


def cmd_tables(args):
    H_grid = args.H_grid or SweepConfig().H_grid
    for H in H_grid:
        pf.check_H(H)
    r_grid = args.r_grid or [0.0, 1.0, 3.0]
    rho_grid = args.rho_grid or [0.5, 1.0, 3.0]
    kappas = args.kappa_grid or [-2.0, -1.5, -1.0, -0.5, 0.0]
    out = args.out or "."
    _ensure_dir(out)

    with open(os.path.join(out, "table_H.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["H", "a_H_inf", "a_H_inf_quadrature", "z_H_inf", "ell"])
        for H in H_grid:
            w.writerow([_fmt(H), _fmt(pf.a_H_inf(H)), _fmt(pf.a_H_inf_quadrature(H)),
                        _fmt(pf.z_H_inf(H)), _fmt(scalar.solve_ell(H).value)])
    with open(os.path.join(out, "table_hypercycle.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["H", "r", "z_H", "a_H", "delta_H", "R"])
        for H in H_grid:
            for r in r_grid:
                if r <= pf.r_min(H):
                    continue
                w.writerow([_fmt(H), _fmt(r), _fmt(pf.z_H(H, r)), _fmt(pf.a_H(H, r)),
                            _fmt(scalar.solve_delta(H, r).value), _fmt(scalar.solve_R(H, r).value)])
    with open(os.path.join(out, "table_nodoid.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["H", "rho", "Z_H", "A_H", "Delta_H", "varrho"])
        for H in H_grid:
            for rho in rho_grid:
                w.writerow([_fmt(H), _fmt(rho), _fmt(pf.Z_H(H, rho)), _fmt(pf.A_H(H, rho)),
                            _fmt(scalar.solve_Delta(H, rho).value),
                            _fmt(scalar.solve_rho_crit(H, rho).value)])
    with open(os.path.join(out, "table_F.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["H", "kappa", "F"])
        for H in H_grid:
            for k in sorted(set(kappas) | {2 * H}):
                w.writerow([_fmt(H), _fmt(k), _fmt(scalar.F_dispatch(H, k))])
    print(f"tables written to {out}")
    return EXIT_OK


def cmd_export_disk(args):
    data = np.loadtxt(args.input, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 3:
        raise DomainError("input needs three columns: two chart coordinates and u")
    write_disk_csv(args.out, Chart(args.chart), data[:, 0], data[:, 1], data[:, 2])
    print(f"wrote {len(data)} points to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="cmcbar", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("profile", help="sample a barrier profile")
    q.add_argument("family", choices=[f.value for f in pf.Family])
    q.add_argument("--H", type=float, required=True)
    q.add_argument("--l", type=float)
    q.add_argument("--r", type=float)
    q.add_argument("--rho", type=float)
    q.add_argument("--samples", type=int, default=pf.PROFILE_SAMPLES)
    q.add_argument("--out", help="output path without extension")
    q.add_argument("--format", type=lambda s: s.split(","), default=["csv", "json"])
    q.set_defaults(func=cmd_profile)

    q = sub.add_parser("verify", help="run the property suite")
    q.add_argument("--config", help="JSON sweep configuration")
    q.add_argument("--H-grid", type=_floats)
    q.add_argument("--r-grid", type=_floats)
    q.add_argument("--rho-grid", type=_floats)
    q.add_argument("--l-grid", type=_floats)
    q.add_argument("--out")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("solve", help="solve the Dirichlet problem on a chart rectangle")
    q.add_argument("chart", choices=["strip", "annulus"])
    q.add_argument("--H", type=float, required=True)
    q.add_argument("--l", type=float, default=1.0)
    q.add_argument("--rho", type=float, default=1.0)
    q.add_argument("--d1", type=float)
    q.add_argument("--d2", type=float)
    q.add_argument("--n", type=int, default=129)
    q.add_argument("--levels", type=int, default=1, help=">1 runs a refinement study")
    q.add_argument("--tol", type=float, default=pde.NEWTON_TOL)
    q.add_argument("--disk", action="store_true", help="also write Poincare disk CSV")
    q.add_argument("--out")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("tables", help="tabulate barrier quantities")
    q.add_argument("--H-grid", type=_floats)
    q.add_argument("--r-grid", type=_floats)
    q.add_argument("--rho-grid", type=_floats)
    q.add_argument("--kappa-grid", type=_floats)
    q.add_argument("--out")
    q.set_defaults(func=cmd_tables)

    q = sub.add_parser("export-disk", help="map a chart CSV into the Poincare disk")
    q.add_argument("input")
    q.add_argument("--chart", choices=[c.value for c in Chart], required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_export_disk)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"cmcbar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, BracketError) as exc:
        print(f"cmcbar: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
