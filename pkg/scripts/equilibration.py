"""How fast the constant-control run settles: signal change and shape-ratio drift per window."""
import argparse

import numpy as np

from dpde.controls import U1
from dpde.dynamics import SimConfig, simulate
from dpde.equilibria import shape_ratio
from dpde.geometry import l2_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-final", type=float, default=16.0)
    ap.add_argument("--n-cells", type=int, default=100)
    args = ap.parse_args()

    tr = simulate(SimConfig(n_cells=args.n_cells, t_final=args.t_final, snapshot_every=0.5), U1)
    grid = tr.grid
    print("t,signal_change_ratio_t_to_2t,shape_ratio_variation_t_to_2t,r_pi_squared")
    for t in np.arange(1.0, args.t_final / 2 + 1e-9, 1.0):
        a, b = tr.at(t).s, tr.at(2 * t).s
        _, var = shape_ratio(tr, (t, 2 * t))
        print(f"{t:g},{l2_norm(b - a, grid) / l2_norm(a, grid):.5f},{var:.5f},{tr.at(t).r[-1] ** 2:.4f}")


if __name__ == "__main__":
    main()
