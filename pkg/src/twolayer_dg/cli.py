"""Command line front end: ``solver run``, ``solver convergence`` and ``solver check``."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import ConfigError, load_config
from .output import (convergence_report, solution_filename, write_convergence_csv,
                     write_solution)
from .physics import PositivityError
from .scenarios import build_scenario
from .timestep import run

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2


def parse_degrees(text):
    """``a:step:b`` (inclusive) or ``a:b`` -> list of degrees."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"degrees must be integers, got {text!r}") from None
    if len(nums) == 2:
        a, step, b = nums[0], 1, nums[1]
    elif len(nums) == 3:
        a, step, b = nums
    else:
        raise argparse.ArgumentTypeError(f"degrees must look like a:step:b, got {text!r}")
    if a < 1 or step < 1 or b < a:
        raise argparse.ArgumentTypeError(f"invalid degree range {text!r}")
    return list(range(a, b + 1, step))


def _apply_overrides(cfg, args):
    if getattr(args, "flux", None):
        cfg.flux = args.flux
    if getattr(args, "degree", None) is not None:
        if args.degree < 1:
            raise ConfigError(f"--degree must be >= 1, got {args.degree}")
        cfg.degree = args.degree
    return cfg


def _run(args):
    cfg = _apply_overrides(load_config(args.config), args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    sc = build_scenario(cfg.scenario, **cfg.scenario_kwargs())
    dumps = {"count": 0}

    def on_sample(t, U):
        if cfg.dump_interval and dumps["count"] % cfg.dump_interval == 0:
            write_solution(os.path.join(cfg.output_dir, solution_filename(t)), sc.semi, U)
        dumps["count"] += 1

    U, rec = run(sc.semi, sc.integrator, sc.U0, exact=sc.exact, on_sample=on_sample)
    write_solution(os.path.join(cfg.output_dir, solution_filename(rec.t[-1])), sc.semi, U)
    rec.write_csv(os.path.join(cfg.output_dir, "diagnostics.csv"))
    d = np.asarray(rec.dSdt)
    print(f"scenario {sc.name}: N={sc.semi.ops.degree}, flux={sc.semi.surface_flux}, "
          f"K={len(sc.semi.geometry)}, t_end={rec.t[-1]:.6g}, samples={len(rec.t)}")
    print(f"entropy rate dS/dt: min {d.min():.4e}  mean {d.mean():.4e}  max {d.max():.4e}")
    print(f"max lake-at-rest error: H1 {max(rec.err_H1):.3e}  H2 {max(rec.err_H2):.3e}")
    if sc.exact is not None:
        print("final L2 errors: " + "  ".join(f"{e:.3e}" for e in rec.l2[-1]))
    print(f"wrote {cfg.output_dir}")
    return EXIT_OK


def _convergence(args):
    cfg = _apply_overrides(load_config(args.config), args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    rows = []
    for N in args.degrees:
        kw = cfg.scenario_kwargs()
        kw["N"] = N
        sc = build_scenario(cfg.scenario, **kw)
        if sc.exact is None:
            raise ConfigError(f"scenario {cfg.scenario!r} has no exact solution for a convergence study")
        _, rec = run(sc.semi, sc.integrator, sc.U0, exact=sc.exact)
        rows.append((N, rec.l2[-1]))
        print(f"N={N:3d}  l2_hu1={rec.l2[-1][1]:.4e}", flush=True)
    path = os.path.join(cfg.output_dir, "convergence.csv")
    write_convergence_csv(path, rows)
    if len(rows) >= 3:
        print(convergence_report(path).table())
    print(f"wrote {path}")
    return EXIT_OK


def _check(args):
    from .checks import run_checks
    return EXIT_OK if run_checks() else EXIT_SOLVER


def build_parser():
    parser = argparse.ArgumentParser(prog="solver", description="Two-layer shallow water DGSEM solver")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario described by a config file")
    p.add_argument("config")
    p.add_argument("--flux", choices=("ec", "es"), help="override [run] flux")
    p.add_argument("--degree", type=int, help="override [run] degree")
    p.set_defaults(func=_run)
    p = sub.add_parser("convergence", help="sweep polynomial degrees and report L2 errors")
    p.add_argument("config")
    p.add_argument("--degrees", type=parse_degrees, default=parse_degrees("3:2:9"), help="a:step:b")
    p.add_argument("--flux", choices=("ec", "es"), help="override [run] flux")
    p.set_defaults(func=_convergence)
    p = sub.add_parser("check", help="run the operator and flux property checks")
    p.set_defaults(func=_check)
    return parser


def _threads_from_env():
    value = os.environ.get("SOLVER_THREADS")
    if value is None:
        return None
    try:
        n = int(value)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"SOLVER_THREADS must be a positive integer, got {value!r}")
    return n


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        threads = _threads_from_env()
        if threads is not None:
            from ._kernels import set_threads
            set_threads(threads)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PositivityError, FloatingPointError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
