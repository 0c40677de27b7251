"""Full-covariance Gaussian mixture model with EM fitting and sampling.

All density math runs in log-space through Cholesky factorizations, so
likelihoods stay finite far into the tails. Models are immutable; fitting
returns a new model plus a report with the log-likelihood trace.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError, DataError, NumericError

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class GmmModel:
    """Mixture parameters: weights w_j, means mu_j, covariances Sigma_j."""

    weights: np.ndarray  # (K,)
    means: np.ndarray  # (K, M)
    covariances: np.ndarray  # (K, M, M)
    space: str = "feature"
    schema_fingerprint: str = ""

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def validate(self) -> None:
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise NumericError(f"mixture weights sum to {self.weights.sum()}, expected 1")
        if np.any(self.weights < 0):
            raise NumericError("mixture weights must be non-negative")
        for j, cov in enumerate(self.covariances):
            if not np.allclose(cov, cov.T, atol=1e-12):
                raise NumericError(f"covariance of component {j} is not symmetric")

    def to_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "dim": self.dim,
                "space": self.space,
                "schema_fingerprint": self.schema_fingerprint,
                "weights": self.weights.tolist(),
                "means": self.means.tolist(),
                "covariances": self.covariances.tolist(),
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "GmmModel":
        raw = json.loads(text)
        model = GmmModel(
            weights=np.array(raw["weights"], dtype=float),
            means=np.array(raw["means"], dtype=float),
            covariances=np.array(raw["covariances"], dtype=float),
            space=raw.get("space", "feature"),
            schema_fingerprint=raw.get("schema_fingerprint", ""),
        )
        model.validate()
        return model

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @staticmethod
    def load(path: str | Path) -> "GmmModel":
        return GmmModel.from_json(Path(path).read_text())


@dataclass(frozen=True)
class FitConfig:
    max_iter: int = 500
    tol: float = 1e-6
    reg_floor_scale: float = 1e-6  # times mean data variance, added to diagonals


@dataclass(frozen=True)
class FitReport:
    iterations: int
    log_likelihood_trace: tuple[float, ...]
    converged: bool
    component_occupancy: tuple[float, ...]  # mean responsibility per component

    def to_json(self) -> str:
        return json.dumps(
            {
                "iterations": self.iterations,
                "converged": self.converged,
                "log_likelihood_trace": list(self.log_likelihood_trace),
                "component_occupancy": list(self.component_occupancy),
            },
            indent=2,
        )


def _chol_with_jitter(cov: np.ndarray, label: str) -> np.ndarray:
    """Cholesky factor, escalating diagonal jitter before giving up."""
    jitter = 0.0
    scale = max(float(np.trace(cov)) / cov.shape[0], 1e-300)
    for _ in range(8):
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError:
            jitter = scale * 1e-10 if jitter == 0.0 else jitter * 100.0
    raise NumericError(f"covariance of {label} is not positive-definite even after regularization")


def log_gaussian_pdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray, label: str = "component") -> np.ndarray:
    """Log density of N(mean, cov) at one point or a batch of row vectors."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    mean = np.asarray(mean, dtype=float)
    if x.shape[1] != mean.shape[0]:
        raise DataError(f"point dimension {x.shape[1]} does not match mean dimension {mean.shape[0]}")
    chol = _chol_with_jitter(np.asarray(cov, dtype=float), label)
    diff = x - mean
    # Solve L z = diff^T, so the quadratic form is |z|^2. Overflow to +inf in
    # the far tail is intended: the log density becomes -inf.
    z = np.linalg.solve(chol, diff.T)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    with np.errstate(over="ignore"):
        quad = np.sum(z * z, axis=0)
    return -0.5 * (mean.shape[0] * LOG_2PI + log_det + quad)


def gaussian_pdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> float:
    """Multivariate normal density at a single point."""
    return float(np.exp(log_gaussian_pdf(x, mean, cov)[0]))


def _log_weighted_components(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """(n, K) matrix of log(w_j) + log N(x_i | mu_j, Sigma_j)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.dim:
        raise DataError(f"data dimension {x.shape[1]} does not match model dimension {model.dim}")
    out = np.empty((x.shape[0], model.k))
    with np.errstate(divide="ignore"):
        log_w = np.log(model.weights)
    for j in range(model.k):
        out[:, j] = log_w[j] + log_gaussian_pdf(x, model.means[j], model.covariances[j], f"component {j}")
    return out

def log_density(model: GmmModel, x: np.ndarray) -> np.ndarray:
    return logsumexp(_log_weighted_components(model, x), axis=1)


def density(model: GmmModel, x: np.ndarray) -> float:
    """Mixture density sum_j w_j N(x | mu_j, Sigma_j) at a single point."""
    return float(np.exp(log_density(model, np.atleast_2d(x))[0]))


def responsibilities(model: GmmModel, x: np.ndarray) -> np.ndarray:
    """Posterior component probabilities for one point or a batch.

    If every component underflows to zero density the point is assigned
    entirely to the component with the nearest mean.
    """
    x2 = np.atleast_2d(np.asarray(x, dtype=float))
    logp = _log_weighted_components(model, x2)
    norm = logsumexp(logp, axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):  # dead rows are overwritten below
        gamma = np.exp(logp - norm)
    dead = ~np.isfinite(norm[:, 0])
    if np.any(dead):
        diff = x2[dead, None, :] - model.means[None, :, :]
        # Scale per row before the norm so huge coordinates cannot overflow.
        scale = np.maximum(np.abs(diff).max(axis=(1, 2), keepdims=True), 1e-300)
        nearest = np.argmin(np.linalg.norm(diff / scale, axis=2), axis=1)
        dead_rows = np.flatnonzero(dead)
        gamma[dead_rows] = 0.0
        gamma[dead_rows, nearest] = 1.0
    return gamma if np.asarray(x).ndim > 1 else gamma[0]


def log_likelihood(model: GmmModel, data: np.ndarray) -> float:
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[0] < 1:
        raise DataError("log-likelihood needs at least one row")
    return float(np.sum(log_density(model, data)))


def _farthest_point_indices(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy farthest-point selection of k distinct seed rows."""
    n = data.shape[0]
    chosen = [int(rng.integers(0, n))]
    min_d = np.linalg.norm(data - data[chosen[0]], axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(min_d))
        if min_d[nxt] == 0.0:
            # All remaining rows duplicate a chosen seed; fall back to random.
            remaining = np.setdiff1d(np.arange(n), np.array(chosen))
            nxt = int(rng.choice(remaining))
        chosen.append(nxt)
        min_d = np.minimum(min_d, np.linalg.norm(data - data[nxt], axis=1))
    return np.array(chosen)


def fit(
    data: np.ndarray,
    k: int,
    config: FitConfig = FitConfig(),
    seed: int = 0,
    space: str = "feature",
    schema_fingerprint: str = "",
) -> tuple[GmmModel, FitReport]:
    """Fit a K-component mixture by expectation-maximization.

    Seeds means by farthest-point selection from the data, starts every
    component at the data variance with uniform weights, then alternates
    responsibility updates and weighted moment re-estimation until the
    log-likelihood improves by less than ``tol`` or ``max_iter`` is reached.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n, m = data.shape
    if k < 1:
        raise ConfigError(f"component count must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"component count {k} exceeds row count {n}")

    rng = np.random.default_rng(seed)
    reg = config.reg_floor_scale * max(float(np.mean(np.var(data, axis=0))), 1e-12)
    seeds = _farthest_point_indices(data, k, rng)
    var0 = np.diag(np.maximum(np.var(data, axis=0), reg)) + reg * np.eye(m)
    model = GmmModel(
        weights=np.full(k, 1.0 / k),
        means=data[seeds].copy(),
        covariances=np.repeat(var0[None, :, :], k, axis=0),
        space=space,
        schema_fingerprint=schema_fingerprint,
    )

    trace = [log_likelihood(model, data)]
    converged = False
    gamma = responsibilities(model, data)
    for _ in range(config.max_iter):
        # E-step.
        gamma = responsibilities(model, data)
        # M-step: weighted moments with a diagonal floor on every covariance.
        mass = gamma.sum(axis=0)
        mass = np.maximum(mass, 1e-12)
        weights = mass / n
        weights = weights / weights.sum()
        means = (gamma.T @ data) / mass[:, None]
        covs = np.empty((k, m, m))
        for j in range(k):
            diff = data - means[j]
            cov = (gamma[:, j, None] * diff).T @ diff / mass[j]
            cov = 0.5 * (cov + cov.T) + reg * np.eye(m)
            covs[j] = cov
        model = GmmModel(weights, means, covs, space, schema_fingerprint)
        trace.append(log_likelihood(model, data))
        if abs(trace[-1] - trace[-2]) < config.tol:
            converged = True
            break

    occupancy = tuple(float(v) for v in gamma.mean(axis=0))
    report = FitReport(
        iterations=len(trace) - 1,
        log_likelihood_trace=tuple(trace),
        converged=converged,
        component_occupancy=occupancy,
    )
    return model, report


def sample(model: GmmModel, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n rows from the mixture; returns (rows, component labels)."""
    if n < 1:
        raise ConfigError(f"sample count must be >= 1, got {n}")
    model.validate()
    rng = np.random.default_rng(seed)
    labels = rng.choice(model.k, size=n, p=model.weights / model.weights.sum())
    out = np.empty((n, model.dim))
    for j in range(model.k):
        idx = np.flatnonzero(labels == j)
        if idx.size == 0:
            continue
        chol = _chol_with_jitter(model.covariances[j], f"component {j}")
        z = rng.standard_normal((idx.size, model.dim))
        out[idx] = model.means[j] + z @ chol.T
    return out, labels


def bic(model: GmmModel, data: np.ndarray) -> float:
    """Bayesian information criterion; lower is better."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n, m = data.shape
    p = (model.k - 1) + model.k * m + model.k * m * (m + 1) // 2
    return float(p * np.log(n) - 2.0 * log_likelihood(model, data))
