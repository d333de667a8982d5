"""Command-line entry point: ``bgpwave {solve,kpp,sweep,compare-kpp}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import (BGPWaveError, NonConvergenceError, NoWaveError, OutputError, ParameterError,
                     SingularSystemError)
from .grid import Grid
from .kpp import solve_kpp
from .model import ModelParams
from .sweep import (AXES, SweepSpec, check_trends, compare_kpp, emit_csv, load_config,
                    run_sweep, solver_config, sweep_columns)
from .wave import solve_coupled

logger = logging.getLogger("bgpwave")

EXIT_OK, EXIT_NONCONVERGENCE, EXIT_PARAMS, EXIT_IO = 0, 2, 3, 4

DEFAULTS = {"kappa": 1.0, "alpha": 2.0, "rho": 10.0, "a": 40.0, "h": 0.02}


def _add_model_args(p, rho=True):
    p.add_argument("--config", help="flat 'key = value' file; flags override it")
    p.add_argument("--kappa", type=float)
    p.add_argument("--alpha", type=float)
    if rho:
        p.add_argument("--rho", type=float)
    p.add_argument("--a", type=float, help="half-width of the domain [-a, a]")
    p.add_argument("--h", type=float, help="grid spacing")
    p.add_argument("--tol", type=float, help="profile and speed tolerance")
    p.add_argument("--max-iters", type=int, dest="max_outer", help="cap on outer iterations")
    p.add_argument("--relax", type=float, dest="relaxation", help="initial relaxation factor")
    p.add_argument("--no-regime-check", action="store_true",
                   help="solve the value equation even where phi1 <= 0 (speeds near or above rho)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bgpwave", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="coupled traveling wave")
    _add_model_args(p)
    p.add_argument("--out", help="profile CSV (x, F, Q, Qtilde, R, s_star)")
    p.add_argument("--diagnostics", help="diagnostics JSON")

    p = sub.add_parser("kpp", help="Fisher-KPP traveling wave")
    _add_model_args(p, rho=False)
    p.add_argument("--out", help="profile CSV (x, F)")

    p = sub.add_parser("sweep", help="one-parameter sweep of the coupled solve")
    _add_model_args(p)
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--values", help="comma-separated, strictly increasing")
    p.add_argument("--workers", type=int)
    p.add_argument("--cold", action="store_true", help="no warm starts between sweep values")
    p.add_argument("--out", help="sweep CSV")
    p.add_argument("--check-trends", action="store_true",
                   help="verify the monotone trends along the axis (exit 2 if violated)")

    p = sub.add_parser("compare-kpp", help="coupled wave vs Fisher-KPP wave")
    _add_model_args(p)
    p.add_argument("--out", help="paired profile CSV (x, F_coupled, F_kpp)")
    p.add_argument("--slopes", help="level-slope CSV")
    return ap


def _settings(args) -> dict:
    """Defaults, then the config file, then command-line flags."""
    vals = dict(DEFAULTS)
    if args.config:
        vals.update(load_config(args.config))
    for key in ("kappa", "alpha", "rho", "a", "h", "max_outer", "relaxation", "axis", "workers"):
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    if args.tol is not None:
        vals["tol_profile"] = vals["tol_speed"] = args.tol
    if args.no_regime_check:
        vals["check_regime"] = False
    if getattr(args, "values", None):
        try:
            vals["values"] = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise ParameterError(f"--values must be comma-separated numbers, got {args.values!r}")
    if getattr(args, "cold", False):
        vals["warm_start"] = False
    return vals


def _model(vals, rho=True):
    return ModelParams(vals["kappa"], vals["alpha"], vals["rho"] if rho else None)


def _write_json(obj, path):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_solve(args, vals) -> int:
    grid, params, cfg = Grid(vals["a"], vals["h"]), _model(vals), solver_config(vals)
    sol = solve_coupled(grid, params, cfg)
    d = sol.diagnostics
    print(f"c = {d.c!r}  x0 = {d.x0!r}  gamma = {d.gamma!r}  "
          f"({sol.iterations} outer, {sol.inner_iterations} profile sweeps)")
    if args.out:
        emit_csv(sol.profile_columns(), args.out)
    if args.diagnostics:
        _write_json(d.as_dict(), args.diagnostics)
    return EXIT_OK


def cmd_kpp(args, vals) -> int:
    grid, params, cfg = Grid(vals["a"], vals["h"]), _model(vals, rho=False), solver_config(vals)
    wave = solve_kpp(grid, params, cfg)
    print(f"c = {wave.c!r}  (c_KPP = {params.c_kpp!r}, {wave.iterations} sweeps)")
    if args.out:
        emit_csv({"x": grid.x, "F": wave.F}, args.out)
    return EXIT_OK


def cmd_sweep(args, vals) -> int:
    if "axis" not in vals or "values" not in vals:
        raise ParameterError("sweep needs an axis and values (flags or config file)")
    spec = SweepSpec(params=_model(vals), a=vals["a"], h=vals["h"], axis=vals["axis"],
                     values=tuple(vals["values"]), cfg=solver_config(vals),
                     warm_start=vals.get("warm_start", True))
    records = run_sweep(spec, workers=vals.get("workers", 1))
    for r in records:
        print(f"{spec.axis} = {getattr(r, spec.axis)!r}: {r.status}  c = {r.c!r}  x0 = {r.x0!r}")
    if args.out:
        emit_csv(records, args.out, columns=sweep_columns(spec))
    code = EXIT_OK if all(r.status == "ok" for r in records) else EXIT_NONCONVERGENCE
    if args.check_trends:
        for name, holds, detail in check_trends(records, spec.axis):
            print(f"[{'PASS' if holds else 'FAIL'}] {name}: {detail}")
            if not holds:
                code = EXIT_NONCONVERGENCE
    return code


def cmd_compare(args, vals) -> int:
    grid, params, cfg = Grid(vals["a"], vals["h"]), _model(vals), solver_config(vals)
    cmp_ = compare_kpp(params, grid, cfg)
    print(f"c coupled = {cmp_.c_coupled!r}  c KPP = {cmp_.c_kpp!r}")
    for level, sc, sk in cmp_.slopes:
        print(f"  level {level:.2f}: slope coupled {sc:.6f}  KPP {sk:.6f}")
    if args.out:
        emit_csv(cmp_.pair_columns(), args.out)
    if args.slopes:
        emit_csv(cmp_.slope_rows(), args.slopes, columns=["level", "slope_coupled", "slope_kpp"])
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "kpp": cmd_kpp, "sweep": cmd_sweep, "compare-kpp": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, _settings(args))
    except (NonConvergenceError, NoWaveError, SingularSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParameterError, BGPWaveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
