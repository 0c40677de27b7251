#!/usr/bin/env python3
"""End-to-end pipeline run into a single work directory.

Example:
    python scripts/run_pipeline.py --workdir runs/demo --n 2000 --generate 1000 --seed 11
"""
import argparse
import sys
from pathlib import Path

from pneugen.cli import main as cli


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--n", type=int, default=2000, help="training corpus size")
    parser.add_argument("--generate", type=int, default=1000, help="designs to generate")
    parser.add_argument("--k", type=int, default=3, help="mixture components")
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument(
        "--embed-sample", type=int, default=0,
        help="rows to embed (0 = all; use ~1000 for corpora beyond a few thousand rows)",
    )
    args = parser.parse_args(argv)

    wd = Path(args.workdir)
    wd.mkdir(parents=True, exist_ok=True)
    data = str(wd / "data.csv")
    embedding = str(wd / "embedding.csv")
    model = str(wd / "model.json")
    seed = str(args.seed)

    steps = [
        ["synth", "--n", str(args.n), "--seed", seed, "--out", data],
        ["embed", "--data", data, "--sample", str(args.embed_sample), "--seed", seed,
         "--out", embedding],
        ["train", "--data", data, "--k", str(args.k), "--space", "embedding",
         "--embedding", embedding, "--seed", seed, "--out", model,
         "--report", str(wd / "fit.json")],
        ["generate", "--model", model, "--n", str(args.generate), "--seed", seed,
         "--out", str(wd / "gen.csv")],
        ["evaluate", "--train", data, "--gen", str(wd / "gen.csv"), "--seed", seed,
         "--out", str(wd / "metrics.json")],
        ["report", "--workdir", str(wd)],
    ]
    for argv_step in steps:
        print(f"== pneugen {' '.join(argv_step)}", file=sys.stderr)
        code = cli(argv_step)
        if code != 0:
            return code
    print(f"\npipeline complete; serve it with:\n  pneugen serve --workdir {wd} --port 8008")
    return 0


if __name__ == "__main__":
    sys.exit(run())
