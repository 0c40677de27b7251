"""Work-directory conventions and cached artifact loading.

A pipeline run leaves a bundle of files in one directory: the dataset and the
bounds it was drawn from, the fitted schema and mixture model, the embedding,
generated designs, and metric reports. Both the CLI and the HTTP API resolve
artifacts through this module so they agree on names and parsing. Loads are
cached on file digest, so edits on disk are picked up and unchanged files are
parsed once.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .design_space import DesignDataset, ParameterBounds, read_design_csv
from .embedding import read_embedding_csv
from .errors import DataError
from .gmm import GmmModel
from .preprocess import FeatureSchema, encode_matrix

DATA_CSV = "data.csv"
BOUNDS_JSON = "bounds.json"
SCHEMA_JSON = "schema.json"
MODEL_JSON = "model.json"
FIT_JSON = "fit.json"
EMBEDDING_CSV = "embedding.csv"
EMBEDDING_CONFIG_JSON = "embedding.config.json"
GEN_CSV = "gen.csv"
METRICS_JSON = "metrics.json"
REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory plus atomic rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: str | Path, blob: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_with(path: str | Path, writer: Callable[[Path], None]) -> None:
    """Run a path-taking writer against a temp path, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        writer(Path(tmp))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Workdir:
    """Digest-cached view of a pipeline bundle directory."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._cache: dict[str, tuple[str, Any]] = {}

    def file(self, name: str) -> Path:
        return self.path / name

    def has(self, name: str) -> bool:
        return self.file(name).exists()

    def require(self, name: str) -> Path:
        p = self.file(name)
        if not p.exists():
            raise DataError(f"work directory {self.path} lacks required artifact {name}")
        return p

    def _load(self, name: str, parser: Callable[[Path], Any]) -> Any:
        p = self.require(name)
        digest = file_digest(p)
        hit = self._cache.get(name)
        if hit is not None and hit[0] == digest:
            return hit[1]
        value = parser(p)
        self._cache[name] = (digest, value)
        return value

    def bounds(self) -> ParameterBounds:
        return self._load(BOUNDS_JSON, ParameterBounds.load)

    def dataset(self) -> DesignDataset:
        bounds = self.bounds()
        return self._load(DATA_CSV, lambda p: DesignDataset.from_csv(p, bounds))

    def schema(self) -> FeatureSchema:
        return self._load(SCHEMA_JSON, FeatureSchema.load)

    def model(self) -> GmmModel:
        return self._load(MODEL_JSON, GmmModel.load)

    def embedding(self) -> tuple[np.ndarray, np.ndarray, list[str]]:
        return self._load(EMBEDDING_CSV, read_embedding_csv)

    def metrics(self) -> dict:
        return self._load(METRICS_JSON, lambda p: json.loads(p.read_text()))

    def gen_rows(self):
        return self._load(GEN_CSV, read_design_csv)

    def encoded_data(self) -> np.ndarray:
        """Training matrix encoded under the stored schema (digest-cached)."""
        data_digest = file_digest(self.require(DATA_CSV))
        schema_digest = file_digest(self.require(SCHEMA_JSON))
        key = "encoded::" + data_digest + schema_digest
        hit = self._cache.get(key)
        if hit is not None:
            return hit[1]
        matrix = encode_matrix(self.dataset(), self.schema())
        self._cache[key] = ("", matrix)
        return matrix
