"""Command-line pipeline driver.

Every stage is a subcommand writing plain files, so a full run is a sequence
of invocations over one work directory:

    pneugen synth    --n 2000 --seed 7 --out WD/data.csv
    pneugen embed    --data WD/data.csv --out WD/embedding.csv
    pneugen train    --data WD/data.csv --k 3 --space embedding \\
                     --embedding WD/embedding.csv --out WD/model.json
    pneugen generate --model WD/model.json --n 1000 --seed 7 --out WD/gen.csv
    pneugen evaluate --train WD/data.csv --gen WD/gen.csv --out WD/metrics.json
    pneugen report   --workdir WD

All randomness flows from the explicit --seed of each subcommand. Outputs are
written to a temp file and renamed, so a failed run never leaves partial
artifacts. Exit codes: 0 success, 2 usage/config, 3 data error, 4 numeric
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import design_space, embedding, geometry, gmm, kinematics, metrics, preprocess
from .design_space import DesignDataset, ParameterBounds, SynthesisConfig
from .errors import ConfigError, DataError, NumericError, PneugenError
from .workdir import (
    BOUNDS_JSON,
    DATA_CSV,
    EMBEDDING_CONFIG_JSON,
    EMBEDDING_CSV,
    FIT_JSON,
    GEN_CSV,
    METRICS_JSON,
    MODEL_JSON,
    REPORT_JSON,
    REPORT_TXT,
    SCHEMA_JSON,
    Workdir,
    atomic_write_bytes,
    atomic_write_text,
    atomic_write_with,
)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _sibling(anchor: str | Path, name: str) -> Path:
    return Path(anchor).parent / name


def _load_bounds(explicit: str | None, anchor: str | Path) -> ParameterBounds:
    """Bounds resolution: explicit flag, then sibling bounds.json, then defaults."""
    if explicit:
        return ParameterBounds.load(explicit)
    sibling = _sibling(anchor, BOUNDS_JSON)
    if sibling.exists():
        return ParameterBounds.load(sibling)
    return ParameterBounds.default()


def _load_or_fit_schema(data_path: str, dataset: DesignDataset) -> preprocess.FeatureSchema:
    sibling = _sibling(data_path, SCHEMA_JSON)
    if sibling.exists():
        return preprocess.FeatureSchema.load(sibling)
    return preprocess.fit_schema(dataset)


def parse_row_ref(ref: str) -> tuple[Path, int]:
    """A design reference is CSVPATH:ROWINDEX, e.g. runs/gen.csv:12."""
    if ":" not in ref:
        raise ConfigError(f"design reference must be CSVPATH:ROWINDEX, got {ref!r}")
    path, _, idx = ref.rpartition(":")
    try:
        return Path(path), int(idx)
    except ValueError as exc:
        raise ConfigError(f"bad row index in design reference {ref!r}") from exc


def _load_design(ref: str) -> design_space.DesignParams:
    path, idx = parse_row_ref(ref)
    rows, _ = design_space.read_design_csv(path)
    if not 0 <= idx < len(rows):
        raise DataError(f"row index {idx} outside 0..{len(rows) - 1} of {path}")
    return rows[idx]


def cmd_synth(args) -> int:
    bounds = ParameterBounds.load(args.config) if args.config else ParameterBounds.default()
    config = SynthesisConfig(
        count=args.n,
        bounds=bounds,
        random_fraction=args.random_fraction,
        noise_scale=args.noise_scale,
    )
    dataset = design_space.synthesize_dataset(config, args.seed)
    atomic_write_with(args.out, dataset.to_csv)
    atomic_write_text(_sibling(args.out, BOUNDS_JSON), bounds.to_json() + "\n")
    _log(f"synth: wrote {len(dataset)} rows to {args.out} (modes {dataset.mode_counts()})")
    return 0


def cmd_train(args) -> int:
    bounds = _load_bounds(args.bounds, args.data)
    dataset = DesignDataset.from_csv(args.data, bounds)
    schema = preprocess.fit_schema(dataset)

    if args.space == "feature":
        matrix = preprocess.encode_matrix(dataset, schema)
    else:
        emb_path = args.embedding or _sibling(args.data, EMBEDDING_CSV)
        _, coords, _ = embedding.read_embedding_csv(emb_path)
        matrix = coords

    config = gmm.FitConfig(max_iter=args.max_iter, tol=args.tol)
    model, report = gmm.fit(
        matrix, args.k, config, seed=args.seed,
        space=args.space, schema_fingerprint=schema.fingerprint(),
    )
    atomic_write_text(_sibling(args.out, SCHEMA_JSON), schema.to_json() + "\n")
    atomic_write_text(_sibling(args.out, BOUNDS_JSON), bounds.to_json() + "\n")
    atomic_write_text(args.out, model.to_json() + "\n")
    if args.report:
        atomic_write_text(args.report, report.to_json() + "\n")
    _log(
        f"train: k={args.k} space={args.space} iterations={report.iterations} "
        f"converged={report.converged} ll={report.log_likelihood_trace[-1]:.3f}"
    )
    return 0


def cmd_generate(args) -> int:
    model = gmm.GmmModel.load(args.model)
    schema_path = args.schema or _sibling(args.model, SCHEMA_JSON)
    if not Path(schema_path).exists():
        raise DataError(f"schema file not found: {schema_path}")
    schema = preprocess.FeatureSchema.load(schema_path)
    if model.schema_fingerprint and model.schema_fingerprint != schema.fingerprint():
        raise DataError("model was trained under a different schema than the one on disk")
    bounds = _load_bounds(args.bounds, args.model)

    extra: dict[str, list] = {"repair_distance": []}
    decoded: list[preprocess.DecodedDesign] = []
    if model.space == "feature":
        vectors, _ = gmm.sample(model, args.n, args.seed)
        for v in vectors:
            decoded.append(preprocess.decode(v, schema, bounds))
    else:
        emb_path = args.embedding or _sibling(args.model, EMBEDDING_CSV)
        data_path = args.data or _sibling(args.model, DATA_CSV)
        row_ids, coords, _ = embedding.read_embedding_csv(emb_path)
        dataset = DesignDataset.from_csv(data_path, bounds)
        if row_ids.max() >= len(dataset):
            raise DataError("embedding row ids exceed dataset size")
        source = np.vstack([preprocess.encode(dataset.rows[i], schema) for i in row_ids])
        points, _ = gmm.sample(model, args.n, args.seed)
        extra["dim1"] = [float(pt[0]) for pt in points]
        extra["dim2"] = [float(pt[1]) for pt in points]
        for pt in points:
            vec, _ = embedding.inverse_decode(coords, source, pt, k=args.knn)
            decoded.append(preprocess.decode(vec, schema, bounds))
    extra["repair_distance"] = [d.repair_distance for d in decoded]

    rows = [d.params for d in decoded]
    atomic_write_with(
        args.out,
        lambda p: design_space.write_design_csv(p, rows, ["generated"] * len(rows), extra),
    )
    mode_counts: dict[str, int] = {m: 0 for m in design_space.MODES}
    for r in rows:
        mode_counts[r.mode] += 1
    _log(f"generate: wrote {len(rows)} designs to {args.out} (modes {mode_counts})")
    return 0


def cmd_embed(args) -> int:
    bounds = _load_bounds(args.bounds, args.data)
    dataset = DesignDataset.from_csv(args.data, bounds)
    schema = preprocess.fit_schema(dataset)

    n = len(dataset)
    if args.sample and args.sample < n:
        rng = np.random.default_rng(args.seed)
        row_ids = np.sort(rng.choice(n, size=args.sample, replace=False))
    else:
        row_ids = np.arange(n)
    matrix = np.vstack([preprocess.encode(dataset.rows[i], schema) for i in row_ids])

    config = embedding.EmbeddingConfig(
        perplexity=args.perplexity, iterations=args.iterations, seed=args.seed
    )
    emb = embedding.tsne_embed(
        matrix, config, progress=lambda it, kl: _log(f"embed: iteration {it} kl={kl:.4f}")
    )
    labels = [dataset.rows[i].mode for i in row_ids]
    atomic_write_with(
        args.out, lambda p: embedding.write_embedding_csv(p, emb, labels, row_ids)
    )
    atomic_write_text(_sibling(args.data, SCHEMA_JSON), schema.to_json() + "\n")
    sidecar = {
        "config": json.loads(config.to_json()),
        "final_kl": emb.final_kl,
        "calibration_warnings": emb.calibration_warnings,
        "rows_embedded": int(len(row_ids)),
        "source_rows": n,
    }
    atomic_write_text(_sibling(args.out, EMBEDDING_CONFIG_JSON), json.dumps(sidecar, indent=2) + "\n")
    _log(f"embed: wrote {len(row_ids)} coordinates to {args.out} (final kl {emb.final_kl:.4f})")
    return 0


def _hull_inputs(args, dataset, gen_path, schema):
    """2-D point sets for the diversity hulls, plus a tag naming their space.

    Prefers the stored training embedding and the generated rows' own sampled
    coordinates. Falls back to a small joint embedding of subsampled rows when
    either is missing.
    """
    rng = np.random.default_rng(args.seed)
    emb_path = args.embedding or _sibling(args.train, EMBEDDING_CSV)
    gen_rows, _ = design_space.read_design_csv(gen_path)
    try:
        dim1 = [float(v) for v in design_space.read_csv_column(gen_path, "dim1")]
        dim2 = [float(v) for v in design_space.read_csv_column(gen_path, "dim2")]
        gen_coords = np.column_stack([dim1, dim2])
    except DataError:
        gen_coords = None

    if Path(emb_path).exists() and gen_coords is not None:
        _, train_coords, _ = embedding.read_embedding_csv(emb_path)
        k = min(args.hull_points, len(train_coords), len(gen_coords))
        t_idx = rng.choice(len(train_coords), size=k, replace=False)
        g_idx = rng.choice(len(gen_coords), size=k, replace=False)
        return gen_coords[g_idx], train_coords[t_idx], "embedding"

    # Joint embedding of small subsamples keeps this cheap at any corpus size.
    k = min(args.hull_points, len(dataset), len(gen_rows))
    t_idx = rng.choice(len(dataset), size=k, replace=False)
    g_idx = rng.choice(len(gen_rows), size=k, replace=False)
    stacked = np.vstack(
        [preprocess.encode(dataset.rows[i], schema) for i in t_idx]
        + [preprocess.encode(gen_rows[i], schema) for i in g_idx]
    )
    perplexity = min(30.0, (stacked.shape[0] - 1) / 3 - 1)
    config = embedding.EmbeddingConfig(perplexity=perplexity, iterations=500, seed=args.seed)
    emb = embedding.tsne_embed(stacked, config)
    return emb.coords[k:], emb.coords[:k], "joint-subsample-embedding"


def cmd_evaluate(args) -> int:
    bounds = _load_bounds(args.bounds, args.train)
    dataset = DesignDataset.from_csv(args.train, bounds)
    schema = _load_or_fit_schema(args.train, dataset)
    gen_rows, _ = design_space.read_design_csv(args.gen)
    if not gen_rows:
        raise DataError(f"no generated rows in {args.gen}")

    enc_train = preprocess.encode_matrix(dataset, schema)
    enc_gen = np.vstack([preprocess.encode(r, schema) for r in gen_rows])
    nov = metrics.novelty(enc_gen, enc_train, space="encoded")

    gen2d, train2d, hull_space = _hull_inputs(args, dataset, args.gen, schema)
    div = metrics.diversity_report(gen2d, train2d)

    mode_counts = {m: 0 for m in design_space.MODES}
    for r in gen_rows:
        mode_counts[r.mode] += 1
    payload = {
        "novelty": {"d_new": nov.d_new, "space": nov.space, "count": len(nov.per_sample)},
        "diversity": div.to_dict() | {"space": hull_space},
        "generated_mode_counts": mode_counts,
        "training_rows": len(dataset),
        "generated_rows": len(gen_rows),
    }
    atomic_write_text(args.out, json.dumps(payload, indent=2) + "\n")
    out_dir = Path(args.out).parent
    atomic_write_text(out_dir / "training_hull.csv", metrics.hull_vertices_csv(div.training))
    atomic_write_text(out_dir / "generated_hull.csv", metrics.hull_vertices_csv(div.generated))
    _log(
        f"evaluate: d_new={nov.d_new:.6f}, hull ratio="
        f"{div.area_ratio if div.area_ratio is not None else 'undefined'}, modes {mode_counts}"
    )
    return 0


def cmd_export(args) -> int:
    p = _load_design(args.design)
    report = geometry.geometric_feasibility(p)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures())
        raise DataError(f"design is not feasible ({names}); nothing exported")
    if not args.stl and not args.csg:
        raise ConfigError("nothing to do: pass --stl and/or --csg")
    if args.csg:
        atomic_write_text(args.csg, geometry.export_csg_script(p))
        _log(f"export: wrote CSG script to {args.csg}")
    if args.stl:
        mesh = geometry.build_mesh(p)
        atomic_write_bytes(args.stl, geometry.stl_bytes(mesh))
        _log(f"export: wrote {mesh.triangle_count} triangles to {args.stl}")
    return 0


def cmd_simulate(args) -> int:
    p = _load_design(args.design)
    try:
        pressures = tuple(sorted(float(v) for v in args.pressures.split(",")))
    except ValueError as exc:
        raise ConfigError(f"bad pressure list {args.pressures!r}") from exc
    cfg = kinematics.KinematicsConfig(
        curvature_per_kpa=args.curvature,
        pressures_kpa=pressures,
        samples_per_segment=args.density,
    )
    trajectories = kinematics.trajectory_sweep(p, cfg)
    atomic_write_with(args.out, lambda path: kinematics.write_trajectory_csv(path, trajectories))
    summary = {
        "design": args.design,
        "modes": {repr(tr.pressure_kpa): kinematics.classify_mode(tr) for tr in trajectories},
        "tip_displacement_mm": {
            repr(tr.pressure_kpa): tr.tip_displacement() for tr in trajectories
        },
    }
    print(json.dumps(summary))
    _log(f"simulate: wrote {len(trajectories)} trajectories to {args.out}")
    return 0


def cmd_report(args) -> int:
    wd = Workdir(args.workdir)
    payload: dict = {"workdir": str(wd.path)}
    lines = [f"pipeline report for {wd.path}"]

    if wd.has(DATA_CSV) and wd.has(BOUNDS_JSON):
        dataset = wd.dataset()
        prov: dict[str, int] = {}
        for tag in dataset.provenance:
            prov[tag] = prov.get(tag, 0) + 1
        payload["dataset"] = {
            "rows": len(dataset),
            "mode_counts": dataset.mode_counts(),
            "provenance_counts": prov,
        }
        lines.append(f"dataset: {len(dataset)} rows, modes {dataset.mode_counts()}, provenance {prov}")
    if wd.has(MODEL_JSON):
        model = wd.model()
        payload["model"] = {"k": model.k, "dim": model.dim, "space": model.space}
        lines.append(f"model: k={model.k} over {model.dim}-d {model.space} space")
    if wd.has(FIT_JSON):
        fit_info = json.loads(wd.file(FIT_JSON).read_text())
        payload["fit"] = {
            "iterations": fit_info["iterations"],
            "converged": fit_info["converged"],
            "final_log_likelihood": fit_info["log_likelihood_trace"][-1],
        }
        lines.append(
            f"fit: {fit_info['iterations']} iterations, converged={fit_info['converged']}"
        )
    if wd.has(GEN_CSV):
        gen_rows, _ = wd.gen_rows()
        counts = {m: 0 for m in design_space.MODES}
        for r in gen_rows:
            counts[r.mode] += 1
        payload["generated"] = {"rows": len(gen_rows), "mode_counts": counts}
        lines.append(f"generated: {len(gen_rows)} designs, modes {counts}")
    if wd.has(METRICS_JSON):
        m = wd.metrics()
        payload["metrics"] = m
        lines.append(f"novelty d_new = {m['novelty']['d_new']:.6f} ({m['novelty']['space']} space)")
        div = m["diversity"]
        lines.append(
            "hull areas: generated "
            f"{div['generated_hull']['area']:.3f}, training {div['training_hull']['area']:.3f}, "
            f"ratio {div['area_ratio']}"
        )

    atomic_write_text(wd.file(REPORT_JSON), json.dumps(payload, indent=2) + "\n")
    atomic_write_text(wd.file(REPORT_TXT), "\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server_api import create_app

    app = create_app(args.workdir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pneugen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a training dataset")
    p.add_argument("--config", help="bounds JSON (defaults to built-in bounds)")
    p.add_argument("--n", type=int, required=True, help="row count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output dataset CSV")
    p.add_argument("--random-fraction", type=float, default=0.5)
    p.add_argument("--noise-scale", type=float, default=0.05)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit the mixture model")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="output model JSON")
    p.add_argument("--report", help="output fit report JSON")
    p.add_argument("--space", choices=["feature", "embedding"], default="feature")
    p.add_argument("--embedding", help="embedding CSV (embedding space only)")
    p.add_argument("--bounds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="sample new designs from a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output design CSV")
    p.add_argument("--schema")
    p.add_argument("--bounds")
    p.add_argument("--embedding", help="embedding CSV (embedding-space models)")
    p.add_argument("--data", help="training CSV (embedding-space models)")
    p.add_argument(
        "--knn", type=int, default=25,
        help="neighbors for embedding decoding; wider than the interactive "
        "default so samples landing between categories blend into mixed designs",
    )
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("embed", help="project the dataset to 2-D")
    p.add_argument("--data", required=True)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--sample", type=int, default=0, help="embed at most this many rows (0 = all)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bounds")
    p.add_argument("--out", required=True, help="output embedding CSV")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("evaluate", help="novelty and diversity of generated designs")
    p.add_argument("--train", required=True)
    p.add_argument("--gen", required=True)
    p.add_argument("--out", required=True, help="output metrics JSON")
    p.add_argument("--embedding", help="training embedding CSV for the hulls")
    p.add_argument("--hull-points", type=int, default=50)
    p.add_argument("--bounds")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export", help="geometry files for one design")
    p.add_argument("--design", required=True, help="CSVPATH:ROWINDEX")
    p.add_argument("--stl")
    p.add_argument("--csg")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("simulate", help="trajectory sweep for one design")
    p.add_argument("--design", required=True, help="CSVPATH:ROWINDEX")
    p.add_argument("--pressures", default="0,20,40,60", help="comma-separated kPa values")
    p.add_argument("--out", required=True, help="output trajectory CSV")
    p.add_argument("--curvature", type=float, default=kinematics.KinematicsConfig().curvature_per_kpa)
    p.add_argument("--density", type=int, default=8, help="samples per chamber segment")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="bind all artifacts into one summary")
    p.add_argument("--workdir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the work directory over HTTP")
    p.add_argument("--workdir", required=True)
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 3
    except (NumericError, PneugenError) as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
