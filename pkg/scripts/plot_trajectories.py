#!/usr/bin/env python3
"""3-D trajectory panels for the three reference actuators across pressures.

Produces one subplot per actuation mode, each showing the deformed backbone
at several pressures. Requires matplotlib.

    python scripts/plot_trajectories.py --out trajectories.png
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pneugen.design_space import make_design
from pneugen.kinematics import KinematicsConfig, classify_mode, trajectory_sweep

REFERENCE_DESIGNS = {
    "bending": make_design(L=9.51, W=15.2, H=13.01, t=4.02, t_n=1.5, t_h=3.95,
                           t_ab=1.95, t_b=2.12, N=12, theta=0.0, alpha=0.0),
    "twisting": make_design(L=7.83, W=16.55, H=8.5, t=0.76, t_n=3.89, t_h=3.05,
                            t_ab=1.89, t_b=2.4, N=8, theta=27.2, alpha=1.0),
    "mixed": make_design(L=8.01, W=15.12, H=12.98, t=1.49, t_n=2.8, t_h=4.07,
                         t_ab=2.05, t_b=1.97, N=12, theta=27.2, alpha=0.5),
}


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="trajectories.png")
    parser.add_argument("--pressures", default="0,20,40,60")
    args = parser.parse_args(argv)

    pressures = tuple(float(v) for v in args.pressures.split(","))
    cfg = KinematicsConfig(pressures_kpa=pressures, samples_per_segment=16)

    fig = plt.figure(figsize=(15, 5))
    for i, (name, design) in enumerate(REFERENCE_DESIGNS.items(), start=1):
        ax = fig.add_subplot(1, 3, i, projection="3d")
        for tr in trajectory_sweep(design, cfg):
            pts = tr.points
            ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], label=f"{tr.pressure_kpa:.0f} kPa")
        top = trajectory_sweep(design, cfg)[-1]
        ax.set_title(f"{name}: {classify_mode(top)} at {pressures[-1]:.0f} kPa")
        ax.set_xlabel("x [mm]")
        ax.set_ylabel("y [mm]")
        ax.set_zlabel("z [mm]")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    run()
