"""Command-line entry point: ``dpde <subcommand> ... --out-dir DIR``.

Exit codes: 0 success, 2 configuration error, 3 simulation or planning failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..dynamics import terminal_state
from ..equilibria import (constant_equilibrium, equilibrium_residual, exponential_equilibrium,
                          self_similar_radius)
from ..errors import (ConfigError, DegenerateBoundaryRadius, MissingSnapshot, NoDescent,
                      NonPositiveRadius, SeriesDivergence, SimulationFailure, UnstableStep)
from ..geometry import l2_norm, make_grid
from ..planner import flatness_control, optimize_control
from .config import parse_config
from .experiments import convergence_study, resolve, run_experiment
from .io import atomic_write, fmt, read_profile_csv, write_control_csv, write_summary
from .presets import PRESETS

log = logging.getLogger("dpde")

EXIT_CONFIG = 2
EXIT_SIMULATION = 3
SIMULATION_ERRORS = (NonPositiveRadius, UnstableStep, SimulationFailure, NoDescent, SeriesDivergence,
                     DegenerateBoundaryRadius)


def _cmd_simulate(args):
    svg_times = [float(t) for t in args.svg_times] if args.svg_times else ()
    art = run_experiment(args.config, args.out_dir, n_cells=args.n_cells, svg_times=svg_times)
    print(f"wrote {art.trajectory_csv}")
    print(f"wrote {art.summary}")
    for p in art.svgs:
        print(f"wrote {p}")
    for k, v in art.metrics.items():
        print(f"  {k} = {v}")


def _cmd_plan_flat(args):
    plan = flatness_control(args.c, args.T, K=args.K, sigma=args.sigma, samples=args.samples)
    out = Path(args.out_dir)
    ctl = write_control_csv(plan.control, out / "flat_control.csv")
    summary = write_summary({"target_value": plan.target_value, "horizon": plan.horizon,
                             "truncation": plan.truncation, "sigma": plan.sigma,
                             "max_series_tail": plan.max_tail}, out / "flat_summary.txt")
    print(f"wrote {ctl}\nwrote {summary}")


def _target_profile(spec, grid, T):
    if spec in PRESETS or spec.endswith(".cfg") or Path(spec).is_file() and not spec.endswith(".csv"):
        preset = resolve(spec).with_cells(grid.n_cells)
        cfg = preset.config.with_(t_final=T)
        return terminal_state(cfg, preset.schedules).r
    if spec.startswith("csv:"):
        spec = spec[4:]
    values = read_profile_csv(spec)
    return grid.check(values, "target")


def _cmd_plan_opt(args):
    grid = make_grid(args.n_cells)
    r0 = np.ones(grid.n_nodes)
    r1 = _target_profile(args.target, grid, args.T)
    report = optimize_control(r0, r1, args.T, knots=args.knots,
                              weights=(args.w_shape, args.w_signal, args.w_reg),
                              tol=args.tol, max_iters=args.max_iters)
    out = Path(args.out_dir)
    ctl = write_control_csv(report.schedule, out / "opt_control.csv")
    summary = write_summary({
        "iterations": report.iterations,
        "converged": report.converged,
        "reason": report.reason,
        "cost": report.cost,
        "terminal_shape_error": report.terminal_shape_error,
        "terminal_signal_error": report.terminal_signal_error,
        "target_L2": l2_norm(r1, grid),
        "simulations": report.simulations,
    }, out / "opt_summary.txt")
    atomic_write(out / "opt_cost_history.txt", "".join(fmt(c) + "\n" for c in report.cost_history))
    print(f"wrote {ctl}\nwrote {summary}")
    print(f"  J={report.cost:.6g} shape_err={report.terminal_shape_error:.3g} "
          f"signal_err={report.terminal_signal_error:.3g} ({report.reason})")


def _cmd_equilibria(args):
    grid = make_grid(args.n_cells)
    if args.lam == 0:
        prof = constant_equilibrium(args.u_e, grid)
    else:
        prof = exponential_equilibrium(args.u_e, args.lam, grid)
    res = equilibrium_residual(prof.s_e, grid)
    lines = ["theta,s_e,r_e"]
    r_e = self_similar_radius(prof, args.r0_pi, args.t) if prof.u_e > 0 else np.full(grid.n_nodes, args.r0_pi)
    lines += [f"{fmt(th)},{fmt(s)},{fmt(r)}" for th, s, r in zip(grid.thetas, prof.s_e, r_e)]
    out = Path(args.out_dir)
    prof_path = atomic_write(out / "equilibrium.csv", "\n".join(lines) + "\n")
    summary = write_summary({"family": prof.family.value, "u_e": prof.u_e, "lambda": prof.lam,
                             "neumann_defect": prof.neumann_defect,
                             "max_interior_residual": float(np.max(np.abs(res[1:-1])))},
                            out / "equilibrium_summary.txt")
    print(f"wrote {prof_path}\nwrote {summary}")


def _cmd_converge(args):
    table = convergence_study(args.preset, args.levels)
    path = atomic_write(Path(args.out_dir) / f"{table.preset}_convergence.csv", table.format())
    print(table.format(), end="")
    print(f"wrote {path}")


def _cmd_render(args):
    from .io import export_svg
    for p in export_svg(args.csv, [float(t) for t in args.times], args.out_dir):
        print(f"wrote {p}")


def build_parser():
    ap = argparse.ArgumentParser(prog="dpde", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--out-dir", default="out", help="output directory (default: ./out)")
        p.set_defaults(func=fn)
        return p

    p = add("simulate", _cmd_simulate, "run a preset or a key=value config file")
    p.add_argument("config", help=f"preset ({', '.join(PRESETS)}) or config path")
    p.add_argument("--n-cells", type=int)
    p.add_argument("--svg-times", nargs="*", help="also render these snapshot times")

    p = add("plan-flat", _cmd_plan_flat, "flatness-based control for the static heat problem")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--K", type=int, default=12)
    p.add_argument("--sigma", type=float, default=1.65)
    p.add_argument("--samples", type=int, default=2001)

    p = add("plan-opt", _cmd_plan_opt, "optimize a control toward a target radius")
    p.add_argument("--target", default="fig5_circle",
                   help="preset/config whose final radius is the target, or csv:<theta,value file>")
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--n-cells", type=int, default=100)
    p.add_argument("--knots", type=int, default=20)
    p.add_argument("--w-shape", type=float, default=1.0)
    p.add_argument("--w-signal", type=float, default=1.0)
    p.add_argument("--w-reg", type=float, default=1e-4)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=200)

    p = add("equilibria", _cmd_equilibria, "constant/exponential equilibrium profile and residual")
    p.add_argument("--u-e", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--r0-pi", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--n-cells", type=int, default=100)

    p = add("converge", _cmd_converge, "grid-refinement study of a preset")
    p.add_argument("preset")
    p.add_argument("--levels", type=int, nargs="+", default=[50, 100, 200])

    p = add("render", _cmd_render, "render snapshots of a trajectory CSV as SVG")
    p.add_argument("csv")
    p.add_argument("--times", nargs="+", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("numba").setLevel(logging.WARNING)
    try:
        args.func(args)
    except (ConfigError, KeyError, FileNotFoundError, MissingSnapshot, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SIMULATION_ERRORS as exc:
        where = f" (t={exc.t})" if getattr(exc, "t", None) is not None else ""
        print(f"simulation failure{where}: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
