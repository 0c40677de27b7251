"""Exact t-SNE for 2-D design-space maps, plus a k-nearest-neighbor inverse decoder.

The embedding is the O(n^2) formulation: per-row Gaussian bandwidths are
calibrated by binary search so every conditional distribution has the target
perplexity, low-dimensional affinities use the Student-t kernel, and the
Kullback-Leibler divergence is minimized by momentum gradient descent with
early exaggeration. Working sets here are at most a few thousand rows, where
the exact method is both fast enough and the easiest to verify.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigError, DataError, NumericError

Q_FLOOR = 1e-12


@dataclass(frozen=True)
class EmbeddingConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    output_dim: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.output_dim not in (2, 3):
            raise ConfigError("output dimension must be 2 or 3")
        if self.perplexity <= 1.0:
            raise ConfigError("perplexity must exceed 1")

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2)

    @staticmethod
    def from_json(text: str) -> "EmbeddingConfig":
        return EmbeddingConfig(**json.loads(text))


@dataclass(frozen=True)
class Embedding:
    """Low-dimensional coordinates aligned row-for-row with the source matrix."""

    coords: np.ndarray  # (n, output_dim)
    kl_trace: tuple[float, ...]
    config: EmbeddingConfig
    calibration_warnings: int = 0

    @property
    def final_kl(self) -> float:
        return self.kl_trace[-1]


class SigmaCalibration(NamedTuple):
    sigma: float
    p_row: np.ndarray
    converged: bool


def calibrate_sigma(
    sq_distances_row: np.ndarray,
    perplexity: float,
    self_index: int | None = None,
    tol: float = 1e-5,
    max_steps: int = 200,
) -> SigmaCalibration:
    """Find the Gaussian bandwidth whose conditional row has the target perplexity.

    Binary search on the precision beta = 1/(2 sigma^2) until the Shannon
    entropy of p_{j|i} matches ln(perplexity) within ``tol``. The entry at
    ``self_index`` is excluded and returned as exactly zero. When the target
    is unreachable (for example fewer distinct distances than the perplexity
    asks for) the best row found is returned with ``converged=False``.
    """
    d = np.asarray(sq_distances_row, dtype=float).copy()
    n = d.shape[0]
    mask = np.ones(n, dtype=bool)
    if self_index is not None:
        mask[self_index] = False
    if mask.sum() < 2:
        raise DataError("bandwidth calibration needs at least two other points")
    d_others = d[mask]
    d_others = d_others - d_others.min()  # shift for overflow safety; entropy unchanged

    target = float(np.log(perplexity))
    beta, beta_min, beta_max = 1.0, 0.0, np.inf
    p_others = np.full(d_others.shape, 1.0 / d_others.shape[0])
    entropy = np.log(d_others.shape[0])
    converged = False
    for _ in range(max_steps):
        w = np.exp(-d_others * beta)
        total = w.sum()
        p_others = w / total
        # H = ln(sum w) + beta * E[d]; avoids log(p) underflow issues.
        entropy = float(np.log(total) + beta * np.dot(d_others, p_others))
        if abs(entropy - target) < tol:
            converged = True
            break
        if entropy > target:
            beta_min = beta
            beta = beta * 2.0 if beta_max == np.inf else 0.5 * (beta + beta_max)
        else:
            beta_max = beta
            beta = beta / 2.0 if beta_min == 0.0 else 0.5 * (beta + beta_min)

    p = np.zeros(n)
    p[mask] = p_others
    return SigmaCalibration(sigma=float(np.sqrt(0.5 / beta)), p_row=p, converged=converged)


def conditional_probabilities(sq_dists: np.ndarray, perplexity: float) -> tuple[np.ndarray, int]:
    """Row-calibrated conditional affinity matrix; returns (P_cond, warning count)."""
    n = sq_dists.shape[0]
    p = np.zeros((n, n))
    warnings = 0
    for i in range(n):
        cal = calibrate_sigma(sq_dists[i], perplexity, self_index=i)
        p[i] = cal.p_row
        warnings += 0 if cal.converged else 1
    return p, warnings


def joint_probabilities(data: np.ndarray, perplexity: float) -> tuple[np.ndarray, int]:
    """Symmetrized joint affinities P = (P_cond + P_cond^T) / (2n)."""
    sq = cdist(data, data, "sqeuclidean")
    p_cond, warnings = conditional_probabilities(sq, perplexity)
    p = (p_cond + p_cond.T) / (2.0 * data.shape[0])
    return p, warnings


def _student_t_affinities(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Student-t kernel weights and normalized affinities for coordinates y."""
    sq = cdist(y, y, "sqeuclidean")
    w = 1.0 / (1.0 + sq)
    np.fill_diagonal(w, 0.0)
    q = w / w.sum()
    return q, w


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(P || Q) over off-diagonal entries with p > 0; q floored at 1e-12."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / np.maximum(q[mask], Q_FLOOR))))


def kl_gradient(p: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Analytic gradient of KL(P || Q(y)) and the current divergence."""
    q, w = _student_t_affinities(y)
    pq = (p - q) * w
    grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
    return grad, kl_divergence(p, q)


def tsne_embed(
    data: np.ndarray,
    config: EmbeddingConfig = EmbeddingConfig(),
    progress: Callable[[int, float], None] | None = None,
) -> Embedding:
    """Embed data rows into 2-D (or 3-D) by exact t-SNE.

    Deterministic for a fixed config seed. The recorded KL trace uses the
    un-exaggerated affinities, so it is comparable across the whole run.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n = data.shape[0]
    if n < 10:
        raise DataError(f"embedding needs at least 10 rows, got {n}")
    if not config.perplexity < (n - 1) / 3:
        raise ConfigError(f"perplexity {config.perplexity} too large for {n} rows")
    sq = cdist(data, data, "sqeuclidean")
    off_diag = sq[~np.eye(n, dtype=bool)]
    if np.all(off_diag == 0.0):
        raise DataError("all rows identical; embedding is undefined")

    p, warnings = conditional_probabilities(sq, config.perplexity)
    p = (p + p.T) / (2.0 * n)

    rng = np.random.default_rng(config.seed)
    y = rng.normal(0.0, 1e-2, size=(n, config.output_dim))
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    # KL = sum p log p - sum p log q; the first term is constant over the run.
    p_entropy = float(np.sum(p[p > 0] * np.log(p[p > 0])))
    kl_trace: list[float] = []
    for it in range(config.iterations):
        exaggerate = it < config.exaggeration_iters
        p_eff = p * config.early_exaggeration if exaggerate else p
        q, w = _student_t_affinities(y)
        pq = (p_eff - q) * w
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
        # Per-coordinate adaptive gains: grow while the gradient keeps pointing
        # against the velocity, shrink when it flips sign.
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        momentum = config.momentum_early if it < config.exaggeration_iters else config.momentum_late
        velocity = momentum * velocity - config.learning_rate * (gains * grad)
        y = y + velocity
        y = y - y.mean(axis=0)
        kl_trace.append(p_entropy - float(np.sum(p * np.log(np.maximum(q, Q_FLOOR)))))
        if progress is not None and (it + 1) % 50 == 0:
            progress(it + 1, kl_trace[-1])

    if not np.all(np.isfinite(y)):
        raise NumericError("embedding diverged to non-finite coordinates")
    return Embedding(coords=y, kl_trace=tuple(kl_trace), config=config, calibration_warnings=warnings)


def inverse_decode(
    emb_coords: np.ndarray,
    source: np.ndarray,
    point: np.ndarray,
    k: int = 5,
) -> tuple[np.ndarray, np.ndarray]:
    """Map an embedding-space point back to a source feature vector.

    Takes the inverse-distance-weighted average of the source vectors of the
    k nearest embedded rows; k=1 returns the nearest row verbatim. Returns
    (feature vector, indices of the neighbors used, nearest first).
    """
    emb_coords = np.asarray(emb_coords, dtype=float)
    source = np.asarray(source, dtype=float)
    point = np.asarray(point, dtype=float)
    n = emb_coords.shape[0]
    if emb_coords.shape[0] != source.shape[0]:
        raise DataError("embedding and source row counts differ")
    if not 1 <= k <= n:
        raise ConfigError(f"k must lie in [1, {n}], got {k}")
    dists = np.linalg.norm(emb_coords - point, axis=1)
    order = np.argsort(dists, kind="stable")[:k]
    if k == 1:
        return source[order[0]].copy(), order
    weights = 1.0 / (dists[order] + 1e-9)
    weights = weights / weights.sum()
    return weights @ source[order], order


def write_embedding_csv(
    path: str | Path,
    emb: Embedding,
    mode_labels: list[str],
    row_ids: np.ndarray | None = None,
) -> None:
    """Persist coordinates with the source-row ids they correspond to."""
    coords = emb.coords
    if len(mode_labels) != coords.shape[0]:
        raise DataError("one mode label per embedded row required")
    if row_ids is None:
        row_ids = np.arange(coords.shape[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_id", "dim1", "dim2", "mode_label"])
        for rid, xy, label in zip(row_ids, coords, mode_labels):
            writer.writerow([int(rid), repr(float(xy[0])), repr(float(xy[1])), label])


def read_embedding_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Returns (row ids, coords, mode labels)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file not found: {path}")
    ids: list[int] = []
    coords: list[list[float]] = []
    labels: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:4] != ["row_id", "dim1", "dim2", "mode_label"]:
            raise DataError(f"unexpected embedding CSV header in {path}")
        for record in reader:
            if not record:
                continue
            ids.append(int(record[0]))
            coords.append([float(record[1]), float(record[2])])
            labels.append(record[3])
    return np.array(ids, dtype=int), np.array(coords, dtype=float), labels
