"""Read-mostly HTTP facade over a completed work directory.

The explorer UI browses the embedding, decodes clicked points back into
designs, and fetches per-design geometry and trajectories. Responses are pure
functions of the work directory contents plus the request; files are re-read
only when their digest changes.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import embedding as embedding_mod
from . import geometry, gmm, kinematics, metrics, preprocess
from .errors import DataError, PneugenError
from .kinematics import KinematicsConfig
from .workdir import Workdir

GENERATE_CAP = 10_000


class DecodeRequest(BaseModel):
    x: float
    y: float
    k: int = Field(default=5, ge=1, le=1000)


class GenerateRequest(BaseModel):
    n: int = Field(ge=1, le=GENERATE_CAP)
    seed: int = 0


def _design_payload(p, novelty_value=None, repair=None) -> dict:
    payload = {
        "params": p.as_dict(),
        "feasibility": geometry.geometric_feasibility(p).to_dict(),
    }
    if novelty_value is not None:
        payload["novelty"] = float(novelty_value)
    if repair is not None:
        payload["repair_distance"] = float(repair)
    return payload


def create_app(workdir_path: str) -> FastAPI:
    app = FastAPI(title="pneugen explorer API", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    wd = Workdir(workdir_path)

    def guard(loader):
        """Run a workdir loader, mapping a missing artifact to 409."""
        try:
            return loader()
        except DataError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    def embedding_source() -> tuple[np.ndarray, np.ndarray, list[str], np.ndarray]:
        row_ids, coords, labels = guard(wd.embedding)
        encoded = guard(wd.encoded_data)
        if row_ids.max() >= encoded.shape[0]:
            raise HTTPException(status_code=409, detail="embedding row ids exceed dataset size")
        return row_ids, coords, labels, encoded

    @app.get("/api")
    def route_listing() -> dict:
        return {
            "routes": [
                {"method": "GET", "path": "/api/embedding"},
                {"method": "POST", "path": "/api/decode", "body": {"x": "float", "y": "float", "k": "int"}},
                {"method": "POST", "path": "/api/generate", "body": {"n": "int", "seed": "int"}},
                {"method": "GET", "path": "/api/design/{design_id}"},
                {"method": "GET", "path": "/api/design/{design_id}/trajectory?pressure=KPA"},
                {"method": "GET", "path": "/api/design/{design_id}/mesh"},
                {"method": "GET", "path": "/api/design/{design_id}/csg"},
                {"method": "GET", "path": "/api/metrics"},
            ]
        }

    @app.get("/api/embedding")
    def get_embedding() -> dict:
        row_ids, coords, labels = guard(wd.embedding)
        return {
            "rows": [
                {"id": int(i), "dim1": float(xy[0]), "dim2": float(xy[1]), "mode": label}
                for i, xy, label in zip(row_ids, coords, labels)
            ]
        }

    @app.post("/api/decode")
    def decode_point(req: DecodeRequest) -> dict:
        row_ids, coords, _, encoded = embedding_source()
        schema = guard(wd.schema)
        bounds = guard(wd.bounds)
        k = min(req.k, coords.shape[0])
        vec, order = embedding_mod.inverse_decode(
            coords, encoded[row_ids], np.array([req.x, req.y]), k=k
        )
        decoded = preprocess.decode(vec, schema, bounds)
        nearest = metrics.novelty(
            preprocess.encode(decoded.params, schema)[None, :], encoded
        ).d_new
        payload = _design_payload(decoded.params, novelty_value=nearest, repair=decoded.repair_distance)
        payload["dependent_discrepancy"] = decoded.dependent_discrepancy
        payload["neighbor_ids"] = [int(row_ids[i]) for i in order]
        return payload

    @app.post("/api/generate")
    def generate_designs(req: GenerateRequest) -> dict:
        model = guard(wd.model)
        schema = guard(wd.schema)
        bounds = guard(wd.bounds)
        encoded = guard(wd.encoded_data)
        out = []
        try:
            if model.space == "feature":
                vectors, _ = gmm.sample(model, req.n, req.seed)
                coords_out = [None] * req.n
                decoded = [preprocess.decode(v, schema, bounds) for v in vectors]
            else:
                row_ids, coords, _, encoded_all = embedding_source()
                points, _ = gmm.sample(model, req.n, req.seed)
                decoded = []
                coords_out = []
                for pt in points:
                    vec, _ = embedding_mod.inverse_decode(coords, encoded_all[row_ids], pt, k=5)
                    decoded.append(preprocess.decode(vec, schema, bounds))
                    coords_out.append((float(pt[0]), float(pt[1])))
        except PneugenError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        enc_gen = np.vstack([preprocess.encode(d.params, schema) for d in decoded])
        nov = metrics.novelty(enc_gen, encoded)
        for d, nearest, xy in zip(decoded, nov.per_sample, coords_out):
            item = _design_payload(d.params, novelty_value=nearest, repair=d.repair_distance)
            if xy is not None:
                item["dim1"], item["dim2"] = xy
            out.append(item)
        return {"designs": out, "d_new": nov.d_new}

    def _design_by_id(design_id: int):
        dataset = guard(wd.dataset)
        if not 0 <= design_id < len(dataset):
            raise HTTPException(status_code=404, detail=f"no design with id {design_id}")
        return dataset.rows[design_id]

    @app.get("/api/design/{design_id}")
    def get_design(design_id: int) -> dict:
        return _design_payload(_design_by_id(design_id))

    @app.get("/api/design/{design_id}/trajectory")
    def get_trajectory(design_id: int, pressure: float = Query(default=40.0, ge=0.0)) -> dict:
        p = _design_by_id(design_id)
        try:
            tr = kinematics.backbone_trajectory(p, pressure, KinematicsConfig())
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {
            "pressure_kpa": pressure,
            "mode": kinematics.classify_mode(tr),
            "tip_displacement_mm": tr.tip_displacement(),
            "points": [[float(v) for v in pt] for pt in tr.points],
        }

    @app.get("/api/design/{design_id}/mesh")
    def get_mesh(design_id: int) -> Response:
        p = _design_by_id(design_id)
        try:
            mesh = geometry.build_mesh(p)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return Response(content=geometry.stl_bytes(mesh), media_type="application/octet-stream")

    @app.get("/api/design/{design_id}/csg")
    def get_csg(design_id: int) -> Response:
        p = _design_by_id(design_id)
        try:
            script = geometry.export_csg_script(p)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return Response(content=script, media_type="text/plain")

    @app.get("/api/metrics")
    def get_metrics() -> dict:
        return guard(wd.metrics)

    return app
