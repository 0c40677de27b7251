"""Novelty and diversity measures for generated design sets.

Novelty is the mean Euclidean distance from each generated row to its nearest
training row, computed exactly. Diversity is the area of the 2-D convex hull
of an embedded design set; a generated-over-training area ratio summarizes
spread.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError


@dataclass(frozen=True)
class NoveltyReport:
    d_new: float
    per_sample: tuple[float, ...]
    space: str  # "encoded" or "embedding"

    def to_dict(self) -> dict:
        return {"d_new": self.d_new, "space": self.space, "per_sample": list(self.per_sample)}


def novelty(generated: np.ndarray, training: np.ndarray, space: str = "encoded") -> NoveltyReport:
    """Mean nearest-training-row distance over the generated set. Exact.

    The per-row minimum is order-independent and the final mean uses pairwise
    summation, so results do not depend on row ordering.
    """
    generated = np.atleast_2d(np.asarray(generated, dtype=float))
    training = np.atleast_2d(np.asarray(training, dtype=float))
    if generated.size == 0 or training.size == 0:
        raise DataError("novelty needs non-empty generated and training sets")
    if generated.shape[1] != training.shape[1]:
        raise DataError(
            f"dimension mismatch: generated {generated.shape[1]} vs training {training.shape[1]}"
        )
    nearest = np.empty(generated.shape[0])
    # Chunked so the distance block stays small at corpus scale.
    chunk = max(1, int(4e6) // max(training.shape[0], 1))
    for start in range(0, generated.shape[0], chunk):
        block = cdist(generated[start : start + chunk], training)
        nearest[start : start + chunk] = block.min(axis=1)
    return NoveltyReport(
        d_new=float(np.mean(nearest)),
        per_sample=tuple(float(v) for v in nearest),
        space=space,
    )


@dataclass(frozen=True)
class HullReport:
    vertices: tuple[tuple[float, float], ...]  # counter-clockwise
    area: float
    point_count: int
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "area": self.area,
            "point_count": self.point_count,
            "degenerate": self.degenerate,
        }


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def shoelace_area(vertices: np.ndarray) -> float:
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def convex_hull_2d(points: np.ndarray) -> HullReport:
    """Convex hull by the monotone-chain construction; area by the shoelace formula.

    Duplicate points are removed first. Fewer than three distinct points, or a
    fully collinear set, yields a degenerate report with zero area rather than
    an error.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise DataError("hull points must be 2-D")
    distinct = np.unique(pts, axis=0)  # sorts lexicographically
    n = distinct.shape[0]
    if n < 3:
        return HullReport(tuple(map(tuple, distinct)), 0.0, pts.shape[0], True)

    lower: list[np.ndarray] = []
    for p in distinct:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in distinct[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return HullReport(tuple(map(tuple, distinct[: len(hull)])), 0.0, pts.shape[0], True)
    vertices = np.array(hull)
    return HullReport(
        vertices=tuple((float(v[0]), float(v[1])) for v in vertices),
        area=shoelace_area(vertices),
        point_count=pts.shape[0],
        degenerate=False,
    )


@dataclass(frozen=True)
class DiversityReport:
    generated: HullReport
    training: HullReport
    area_ratio: float | None  # None when either hull is degenerate

    def to_dict(self) -> dict:
        return {
            "generated_hull": self.generated.to_dict(),
            "training_hull": self.training.to_dict(),
            "area_ratio": self.area_ratio,
        }


def diversity_report(generated_embedding: np.ndarray, training_embedding: np.ndarray) -> DiversityReport:
    """Hull areas of both sets plus their ratio, for overlay plotting."""
    gen = convex_hull_2d(generated_embedding)
    train = convex_hull_2d(training_embedding)
    ratio = None
    if not gen.degenerate and not train.degenerate and train.area > 0.0:
        ratio = gen.area / train.area
    return DiversityReport(gen, train, ratio)


def hull_vertices_csv(report: HullReport) -> str:
    lines = ["x,y"]
    lines += [f"{v[0]!r},{v[1]!r}" for v in report.vertices]
    return "\n".join(lines) + "\n"


def metrics_json(nov: NoveltyReport, div: DiversityReport) -> str:
    return json.dumps({"novelty": nov.to_dict(), "diversity": div.to_dict()}, indent=2)
