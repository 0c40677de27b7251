#!/usr/bin/env python3
"""Embedding scatter with optional generated overlay and hull comparison.

Reads a completed work directory (embedding.csv, optionally gen.csv and
metrics.json) and writes a two-panel figure: the mode-colored training map,
and the training/generated convex hulls used by the diversity metric.

    python scripts/plot_embedding.py --workdir runs/demo --out embedding.png
"""
import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pneugen.design_space import read_csv_column
from pneugen.embedding import read_embedding_csv

MODE_COLORS = {"Bending": "tab:blue", "Twisting": "tab:orange", "Mixed": "tab:green"}


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--out", default="embedding.png")
    args = parser.parse_args(argv)
    wd = Path(args.workdir)

    _, coords, labels = read_embedding_csv(wd / "embedding.csv")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(13, 6))
    for mode, color in MODE_COLORS.items():
        mask = np.array([lb == mode for lb in labels])
        if mask.any():
            ax1.scatter(coords[mask, 0], coords[mask, 1], s=8, c=color, label=mode, alpha=0.7)
    gen_path = wd / "gen.csv"
    if gen_path.exists():
        try:
            gx = [float(v) for v in read_csv_column(gen_path, "dim1")]
            gy = [float(v) for v in read_csv_column(gen_path, "dim2")]
            gmode = read_csv_column(gen_path, "mode")
            for mode, color in MODE_COLORS.items():
                mask = np.array([m == mode for m in gmode])
                if mask.any():
                    ax1.scatter(np.array(gx)[mask], np.array(gy)[mask], s=14, c=color,
                                marker="x", label=f"generated {mode}")
        except Exception:
            pass
    ax1.set_title("design-space embedding")
    ax1.legend(fontsize=8)

    metrics_path = wd / "metrics.json"
    if metrics_path.exists():
        payload = json.loads(metrics_path.read_text())
        for key, color in (("training_hull", "tab:blue"), ("generated_hull", "tab:red")):
            hull = payload["diversity"][key]
            v = np.array(hull["vertices"] + hull["vertices"][:1])
            ax2.plot(v[:, 0], v[:, 1], c=color, label=f"{key} (area {hull['area']:.1f})")
        ax2.set_title("diversity hulls")
        ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    run()
