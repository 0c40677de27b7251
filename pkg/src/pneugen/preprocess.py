"""Feature encoding: standardized numerics plus one-hot categoricals, with exact inverse.

The decoder is total: any real-valued vector is repaired back into the
feasible design box (clipping, integer rounding, alpha snapping) and the
dependent fields are recomputed, so decoding always yields a valid design.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .design_space import (
    CATEGORICAL_FIELDS,
    MODES,
    NUMERIC_FIELDS,
    DesignDataset,
    DesignParams,
    ParameterBounds,
    make_design,
    round_half_up,
)
from .errors import DataError

# Raw alpha this close to a pure category is snapped to it, so near-pure
# designs are not manufactured with a single odd chamber.
ALPHA_SNAP_LOW = 0.05
ALPHA_SNAP_HIGH = 0.95


@dataclass(frozen=True)
class FeatureSchema:
    """Column layout and standardization constants for the encoded space.

    Numeric fields are shifted/scaled to zero mean and unit variance
    (population std); zero-variance fields are flagged and passed through as
    constants. Categorical fields expand to one-hot blocks in level order.
    """

    numeric_fields: tuple[str, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]
    zero_variance: tuple[bool, ...]
    categorical_levels: tuple[tuple[str, tuple[str, ...]], ...]

    @property
    def width(self) -> int:
        return len(self.numeric_fields) + sum(len(levels) for _, levels in self.categorical_levels)

    def column_names(self) -> list[str]:
        names = list(self.numeric_fields)
        for fname, levels in self.categorical_levels:
            names += [f"{fname}={lv}" for lv in levels]
        return names

    def to_json(self) -> str:
        return json.dumps(
            {
                "numeric_fields": list(self.numeric_fields),
                "means": list(self.means),
                "stds": list(self.stds),
                "zero_variance": list(self.zero_variance),
                "categorical_levels": [[f, list(lv)] for f, lv in self.categorical_levels],
                "std_convention": "population",
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "FeatureSchema":
        raw = json.loads(text)
        return FeatureSchema(
            numeric_fields=tuple(raw["numeric_fields"]),
            means=tuple(float(x) for x in raw["means"]),
            stds=tuple(float(x) for x in raw["stds"]),
            zero_variance=tuple(bool(x) for x in raw["zero_variance"]),
            categorical_levels=tuple((f, tuple(lv)) for f, lv in raw["categorical_levels"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @staticmethod
    def load(path: str | Path) -> "FeatureSchema":
        return FeatureSchema.from_json(Path(path).read_text())

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def fit_schema(data: DesignDataset) -> FeatureSchema:
    """Fit standardization constants and categorical levels from a dataset.

    Mode levels are pinned to the full three-category list even when the
    training corpus only contains two, so generated designs of the third
    category encode consistently.
    """
    if len(data) < 2:
        raise DataError("schema fitting needs at least two rows")
    matrix = np.array([[getattr(p, f) for f in NUMERIC_FIELDS] for p in data.rows], dtype=float)
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # population std
    zero_var = stds == 0.0

    levels: list[tuple[str, tuple[str, ...]]] = []
    for fname in CATEGORICAL_FIELDS:
        if fname == "mode":
            levels.append((fname, MODES))
            continue
        seen: list[str] = []
        for p in data.rows:
            v = getattr(p, fname)
            if v not in seen:
                seen.append(v)
        levels.append((fname, tuple(seen)))

    return FeatureSchema(
        numeric_fields=NUMERIC_FIELDS,
        means=tuple(float(m) for m in means),
        stds=tuple(float(s) for s in stds),
        zero_variance=tuple(bool(z) for z in zero_var),
        categorical_levels=tuple(levels),
    )


def encode(p: DesignParams, s: FeatureSchema) -> np.ndarray:
    """Encode one design into the standardized feature vector."""
    out = np.empty(s.width)
    for i, fname in enumerate(s.numeric_fields):
        if s.zero_variance[i]:
            out[i] = 0.0
        else:
            out[i] = (float(getattr(p, fname)) - s.means[i]) / s.stds[i]
    offset = len(s.numeric_fields)
    for fname, levels in s.categorical_levels:
        value = getattr(p, fname)
        if value not in levels:
            raise DataError(f"unknown {fname} level {value!r}; schema knows {list(levels)}")
        block = np.zeros(len(levels))
        block[levels.index(value)] = 1.0
        out[offset : offset + len(levels)] = block
        offset += len(levels)
    return out


def encode_matrix(data: DesignDataset, s: FeatureSchema) -> np.ndarray:
    """Encode every row; result rows align with the dataset rows."""
    return np.vstack([encode(p, s) for p in data.rows])


@dataclass(frozen=True)
class DecodedDesign:
    """Decoder output: repaired design plus repair diagnostics.

    ``repair_distance`` is the Euclidean distance, in standardized units over
    the independent numeric fields, between the raw de-standardized values and
    the repaired ones. ``dependent_discrepancy`` is the largest absolute gap
    between the dependent fields carried by the vector and the ones recomputed
    from the repaired independents.
    """

    params: DesignParams
    repair_distance: float
    dependent_discrepancy: float


def decode(v: np.ndarray, s: FeatureSchema, b: ParameterBounds) -> DecodedDesign:
    """Map a feature vector back to a valid design.

    Numerics are de-standardized and clipped to bounds, integers re-rounded,
    and alpha snapped to a pure category when within the snap margin. The mode
    one-hot block is ignored: mode is recomputed from alpha so it always
    agrees with the chamber counts.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (s.width,):
        raise DataError(f"feature vector has length {v.shape}, schema expects {s.width}")

    raw: dict[str, float] = {}
    for i, fname in enumerate(s.numeric_fields):
        raw[fname] = s.means[i] if s.zero_variance[i] else v[i] * s.stds[i] + s.means[i]

    repaired: dict[str, float] = {}
    repair_sq = 0.0
    for fname in b.fields:
        fb = b[fname]
        x = raw[fname]
        if fname == "alpha":
            x = min(max(x, 0.0), 1.0)
            if x < ALPHA_SNAP_LOW:
                x = 0.0
            elif x > ALPHA_SNAP_HIGH:
                x = 1.0
        x = min(max(x, fb.lower), fb.upper)
        if fb.integer:
            x = float(min(max(round_half_up(x), int(fb.lower)), int(fb.upper)))
        repaired[fname] = x
        idx = s.numeric_fields.index(fname)
        if not s.zero_variance[idx]:
            repair_sq += ((x - raw[fname]) / s.stds[idx]) ** 2

    params = make_design(
        L=repaired["L"], W=repaired["W"], H=repaired["H"], t=repaired["t"],
        t_n=repaired["t_n"], t_h=repaired["t_h"], t_ab=repaired["t_ab"], t_b=repaired["t_b"],
        N=int(repaired["N"]), theta=repaired["theta"], alpha=repaired["alpha"],
    )
    discrepancy = max(
        abs(raw["L_T"] - params.L_T),
        abs(raw["N1"] - params.N1),
        abs(raw["N2"] - params.N2),
    )
    return DecodedDesign(params, float(np.sqrt(repair_sq)), float(discrepancy))


def decode_matrix(m: np.ndarray, s: FeatureSchema, b: ParameterBounds) -> list[DecodedDesign]:
    return [decode(row, s, b) for row in np.asarray(m, dtype=float)]
