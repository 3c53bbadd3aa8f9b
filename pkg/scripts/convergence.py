"""Grid-refinement tables for the presets (observed order of r(T) under halving dtheta)."""
import argparse
from pathlib import Path

from dpde.harness.experiments import convergence_study
from dpde.harness.io import atomic_write


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/convergence")
    ap.add_argument("--levels", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--presets", nargs="*",
                    default=["fig_static_const", "fig2_growing_const", "fig4_apple", "fig5_circle", "zero_control"])
    args = ap.parse_args()
    for name in args.presets:
        table = convergence_study(name, args.levels)
        text = table.format()
        atomic_write(Path(args.out_dir) / f"{name}_convergence.csv", text)
        print(text)


if __name__ == "__main__":
    main()
