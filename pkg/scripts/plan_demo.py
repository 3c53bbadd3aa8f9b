"""Motion-planning demos: flatness control of the static problem and the recovery optimization."""
import argparse
import time
from pathlib import Path

import numpy as np

from dpde.controls import U3
from dpde.dynamics import SimConfig, SimMode, terminal_state
from dpde.geometry import l2_norm
from dpde.harness.io import atomic_write, fmt, write_control_csv
from dpde.planner import flatness_control, optimize_control


def flat(args, out):
    plan = flatness_control(args.c, args.T, K=args.K, sigma=args.sigma)
    cfg = SimConfig(mode=SimMode.STATIC_SINGLE, n_cells=args.n_cells, t_final=args.T, snapshot_every=args.T)
    final = terminal_state(cfg, plan.control)
    write_control_csv(plan.control, out / "flat_control.csv")
    print(f"flatness: c={args.c} T={args.T} K={args.K} sigma={args.sigma} "
          f"max tail={plan.max_tail:.2e} |s(T)-c|={l2_norm(final.s - args.c, final.grid):.3e}")


def recover(args, out):
    cfg = SimConfig(n_cells=args.n_cells, t_final=10.0)
    r1 = terminal_state(cfg, U3).r
    t0 = time.perf_counter()
    rep = optimize_control(np.ones(cfg.grid.n_nodes), r1, 10.0, knots=args.knots,
                           weights=(args.w_shape, args.w_signal, args.w_reg), max_iters=args.max_iters,
                           callback=lambda it, u, J: print(f"  iter {it:3d}  J={J:.6e}") if it % 10 == 0 else None)
    write_control_csv(rep.schedule, out / "recovered_control.csv")
    atomic_write(out / "recovered_cost_history.txt", "".join(fmt(c) + "\n" for c in rep.cost_history))
    print(f"recovery: {rep.iterations} iterations in {time.perf_counter() - t0:.1f}s ({rep.reason})")
    print(f"  shape error {rep.terminal_shape_error:.3e} (1e-3*|r1| = {1e-3 * l2_norm(r1, cfg.grid):.3e})")
    print(f"  signal error {rep.terminal_signal_error:.3e}; signal left by u3 itself "
          f"{l2_norm(terminal_state(cfg, U3).s, cfg.grid):.3e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/planning")
    ap.add_argument("--n-cells", type=int, default=100)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--T", type=float, default=5.0)
    ap.add_argument("--K", type=int, default=12)
    ap.add_argument("--sigma", type=float, default=1.65)
    ap.add_argument("--knots", type=int, default=20)
    ap.add_argument("--w-shape", type=float, default=1.0)
    ap.add_argument("--w-signal", type=float, default=1.0)
    ap.add_argument("--w-reg", type=float, default=1e-4)
    ap.add_argument("--max-iters", type=int, default=200)
    ap.add_argument("--skip-recovery", action="store_true")
    args = ap.parse_args()
    out = Path(args.out_dir)
    flat(args, out)
    if not args.skip_recovery:
        recover(args, out)


if __name__ == "__main__":
    main()
