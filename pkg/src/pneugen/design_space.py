"""Pneu-net actuator parameterization, bounds, and synthetic dataset construction.

An actuator is a row of ``N`` inflatable chambers on an inextensible base
layer. Eleven independent parameters describe chamber geometry and layout;
three dependent ones (total length, helical/straight chamber counts) are
derived, and two categorical fields record the actuation mode and chamber
cross-section.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ConfigError, DataError

MODE_BENDING = "Bending"
MODE_TWISTING = "Twisting"
MODE_MIXED = "Mixed"
MODES = (MODE_BENDING, MODE_TWISTING, MODE_MIXED)

CROSS_SECTION = "Rectangular"

# Order matters: it fixes the CSV layout and the feature-encoding order.
INDEPENDENT_FIELDS = ("L", "W", "H", "t", "t_n", "t_h", "t_ab", "t_b", "N", "theta", "alpha")
DEPENDENT_FIELDS = ("L_T", "N1", "N2")
NUMERIC_FIELDS = INDEPENDENT_FIELDS + DEPENDENT_FIELDS
CATEGORICAL_FIELDS = ("mode", "cross_section")
CSV_COLUMNS = NUMERIC_FIELDS + CATEGORICAL_FIELDS
INTEGER_FIELDS = ("N", "N1", "N2")

LENGTH_FIELDS = ("L", "W", "H", "t", "t_n", "t_h", "t_ab", "t_b")

PROVENANCE_TAGS = ("sampled", "augmented", "generated")


def round_half_up(x: float) -> int:
    """Round to nearest integer, ties away from zero toward +inf."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class DesignParams:
    """One actuator design: 11 independent, 3 dependent, 2 categorical fields.

    Lengths in mm, ``theta`` in degrees, ``alpha`` the fraction of helical
    (inclined) chambers.
    """

    L: float
    W: float
    H: float
    t: float
    t_n: float
    t_h: float
    t_ab: float
    t_b: float
    N: int
    theta: float
    alpha: float
    L_T: float
    N1: int
    N2: int
    mode: str
    cross_section: str = CROSS_SECTION

    def numeric_values(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in NUMERIC_FIELDS}

    def as_dict(self) -> dict:
        d = self.numeric_values()
        for name in INTEGER_FIELDS:
            d[name] = int(d[name])
        d["mode"] = self.mode
        d["cross_section"] = self.cross_section
        return d


def derive_dependents(
    L: float,
    t_n: float,
    N: int,
    alpha: float,
) -> tuple[float, int, int, str]:
    """Derive (L_T, N1, N2, mode) from the independent fields.

    The actuator stacks N chambers of outer length L separated by gaps t_n,
    so the total length is N*L + (N-1)*t_n. N1 = round(alpha*N) chambers are
    helical (ties round half up), the remaining N2 are straight. The mode is
    Bending when no chamber is helical, Twisting when all are, Mixed otherwise.
    """
    if N < 1 or int(N) != N:
        raise ConfigError(f"chamber count N must be a positive integer, got {N!r}")
    N = int(N)
    N1 = round_half_up(alpha * N)
    N1 = min(max(N1, 0), N)
    N2 = N - N1
    L_T = N * L + (N - 1) * t_n
    if N1 == 0:
        mode = MODE_BENDING
    elif N2 == 0:
        mode = MODE_TWISTING
    else:
        mode = MODE_MIXED
    return L_T, N1, N2, mode


def make_design(
    L: float,
    W: float,
    H: float,
    t: float,
    t_n: float,
    t_h: float,
    t_ab: float,
    t_b: float,
    N: int,
    theta: float,
    alpha: float,
) -> DesignParams:
    """Build a DesignParams from independent fields, deriving the dependent ones."""
    L_T, N1, N2, mode = derive_dependents(L, t_n, N, alpha)
    return DesignParams(
        L=float(L), W=float(W), H=float(H), t=float(t), t_n=float(t_n), t_h=float(t_h),
        t_ab=float(t_ab), t_b=float(t_b), N=int(N), theta=float(theta), alpha=float(alpha),
        L_T=float(L_T), N1=N1, N2=N2, mode=mode,
    )


@dataclass(frozen=True)
class FieldBounds:
    lower: float
    upper: float
    integer: bool = False


@dataclass(frozen=True)
class ParameterBounds:
    """Lower/upper bounds for every independent parameter."""

    fields: dict[str, FieldBounds]

    def __post_init__(self):
        missing = set(INDEPENDENT_FIELDS) - set(self.fields)
        if missing:
            raise ConfigError(f"bounds missing fields: {sorted(missing)}")
        for name, fb in self.fields.items():
            if not fb.lower < fb.upper:
                raise ConfigError(f"bounds for {name}: lower {fb.lower} must be < upper {fb.upper}")
        a = self.fields["alpha"]
        if a.lower < 0.0 or a.upper > 1.0:
            raise ConfigError("alpha bounds must lie within [0, 1]")

    def __getitem__(self, name: str) -> FieldBounds:
        return self.fields[name]

    @staticmethod
    def default() -> "ParameterBounds":
        text = resources.files("pneugen").joinpath("data/default_bounds.json").read_text()
        return ParameterBounds.from_json(text)

    @staticmethod
    def from_json(text: str) -> "ParameterBounds":
        raw = json.loads(text)
        fields = {
            name: FieldBounds(float(v["lower"]), float(v["upper"]), bool(v.get("integer", False)))
            for name, v in raw.items()
        }
        return ParameterBounds(fields)

    @staticmethod
    def load(path: str | Path) -> "ParameterBounds":
        return ParameterBounds.from_json(Path(path).read_text())

    def to_json(self) -> str:
        raw = {}
        for name in INDEPENDENT_FIELDS:
            fb = self.fields[name]
            entry: dict = {"lower": fb.lower, "upper": fb.upper}
            if fb.integer:
                entry["integer"] = True
            raw[name] = entry
        return json.dumps(raw, indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")


@dataclass(frozen=True)
class Violation:
    field: str
    constraint: str
    value: float | str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{v.field}: {v.constraint} (got {v.value})" for v in self.violations)


def validate_design(p: DesignParams, b: ParameterBounds) -> ValidationReport:
    """Check a design against bounds and structural invariants.

    Violations are data, not errors: the report lists every failed constraint
    and is empty for a valid design.
    """
    out: list[Violation] = []
    for name in LENGTH_FIELDS:
        v = getattr(p, name)
        if not v > 0.0:
            out.append(Violation(name, "must be strictly positive", v))
    if p.N < 1:
        out.append(Violation("N", "must be >= 1", p.N))
    if not 0.0 <= p.alpha <= 1.0:
        out.append(Violation("alpha", "must lie in [0, 1]", p.alpha))

    for name in INDEPENDENT_FIELDS:
        fb = b[name]
        v = getattr(p, name)
        if v < fb.lower or v > fb.upper:
            out.append(Violation(name, f"outside bounds [{fb.lower}, {fb.upper}]", v))
        if fb.integer and int(v) != v:
            out.append(Violation(name, "must be an integer", v))

    if p.N1 < 0 or p.N2 < 0:
        out.append(Violation("N1", "chamber counts must be non-negative", p.N1))
    if p.N1 + p.N2 != p.N:
        out.append(Violation("N1", f"N1 + N2 must equal N={p.N}", p.N1 + p.N2))
    if p.N >= 1 and 0.0 <= p.alpha <= 1.0:
        expected_n1 = round_half_up(p.alpha * p.N)
        if p.N1 != expected_n1:
            out.append(Violation("N1", f"must equal round(alpha*N)={expected_n1}", p.N1))
        expected_lt = p.N * p.L + (p.N - 1) * p.t_n
        if abs(p.L_T - expected_lt) > 1e-9 * max(1.0, abs(expected_lt)):
            out.append(Violation("L_T", f"must equal N*L + (N-1)*t_n = {expected_lt}", p.L_T))
        if p.N1 == 0:
            expected_mode = MODE_BENDING
        elif p.N2 == 0:
            expected_mode = MODE_TWISTING
        else:
            expected_mode = MODE_MIXED
        if p.mode != expected_mode:
            out.append(Violation("mode", f"must be {expected_mode} for N1={p.N1}, N2={p.N2}", p.mode))
    if p.cross_section != CROSS_SECTION:
        out.append(Violation("cross_section", f"must be {CROSS_SECTION}", p.cross_section))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class DesignDataset:
    """Ordered design rows plus the bounds they were drawn from."""

    rows: tuple[DesignParams, ...]
    bounds: ParameterBounds
    provenance: tuple[str, ...]

    def __post_init__(self):
        if len(self.rows) != len(self.provenance):
            raise DataError("provenance must have one tag per row")
        bad = set(self.provenance) - set(PROVENANCE_TAGS)
        if bad:
            raise DataError(f"unknown provenance tags: {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.rows)

    def mode_counts(self) -> dict[str, int]:
        counts = {m: 0 for m in MODES}
        for r in self.rows:
            counts[r.mode] += 1
        return counts

    def to_csv(self, path: str | Path) -> None:
        write_design_csv(path, self.rows, self.provenance)

    @staticmethod
    def from_csv(path: str | Path, bounds: ParameterBounds) -> "DesignDataset":
        rows, provenance = read_design_csv(path)
        return DesignDataset(tuple(rows), bounds, tuple(provenance))


def _format_number(name: str, value) -> str:
    if name in INTEGER_FIELDS:
        return str(int(value))
    return repr(float(value))


def write_design_csv(
    path: str | Path,
    rows: Iterable[DesignParams],
    provenance: Iterable[str],
    extra: dict[str, list] | None = None,
) -> None:
    """Write the fixed 17-column design CSV, plus optional trailing columns."""
    rows = list(rows)
    provenance = list(provenance)
    extra = extra or {}
    for name, values in extra.items():
        if len(values) != len(rows):
            raise DataError(f"extra column {name} has {len(values)} values for {len(rows)} rows")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(CSV_COLUMNS) + ["provenance"] + list(extra))
        for i, (p, tag) in enumerate(zip(rows, provenance)):
            record = [_format_number(name, getattr(p, name)) for name in NUMERIC_FIELDS]
            record += [p.mode, p.cross_section, tag]
            record += [repr(float(extra[name][i])) for name in extra]
            writer.writerow(record)


def read_csv_column(path: str | Path, column: str) -> list[str]:
    """Raw values of one named column; errors if the header lacks it."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or column not in header:
            raise DataError(f"{path}: no column named {column}")
        idx = header.index(column)
        return [rec[idx] for rec in reader if rec]


def read_design_csv(path: str | Path) -> tuple[list[DesignParams], list[str]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"design file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = list(CSV_COLUMNS) + ["provenance"]
        if header is None or header[: len(expected)] != expected:
            raise DataError(f"unexpected design CSV header in {path}")
        rows: list[DesignParams] = []
        provenance: list[str] = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            try:
                values = {name: float(v) for name, v in zip(NUMERIC_FIELDS, record)}
                p = DesignParams(
                    **{k: values[k] for k in NUMERIC_FIELDS if k not in INTEGER_FIELDS},
                    **{k: int(values[k]) for k in INTEGER_FIELDS},
                    mode=record[14],
                    cross_section=record[15],
                )
            except (ValueError, IndexError) as exc:
                raise DataError(f"{path}:{line_no}: bad design row: {exc}") from exc
            rows.append(p)
            provenance.append(record[16] if len(record) > 16 else "sampled")
    return rows, provenance


@dataclass(frozen=True)
class SynthesisConfig:
    """Settings for synthetic dataset construction.

    ``count`` rows are produced: a ``random_fraction`` share by uniform
    sampling inside the bounds, the rest by jittering already-sampled rows.
    Training rows carry alpha drawn from {0, 1} only, so the corpus contains
    exactly two actuation categories.
    """

    count: int
    bounds: ParameterBounds = field(default_factory=ParameterBounds.default)
    random_fraction: float = 0.5
    noise_scale: float = 0.05

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"row count must be >= 1, got {self.count}")
        if not 0.0 < self.random_fraction <= 1.0:
            raise ConfigError("random_fraction must lie in (0, 1]")


def _sample_independent(rng: np.random.Generator, bounds: ParameterBounds) -> dict:
    vals: dict = {}
    for name in INDEPENDENT_FIELDS:
        if name == "alpha":
            continue
        fb = bounds[name]
        if fb.integer:
            vals[name] = int(rng.integers(int(fb.lower), int(fb.upper) + 1))
        else:
            vals[name] = float(rng.uniform(fb.lower, fb.upper))
    # Two training categories only: all chambers straight or all helical.
    # Straight-chamber designs have no inclination, so theta is pinned to 0.
    alpha = float(rng.integers(0, 2))
    vals["alpha"] = alpha
    if alpha == 0.0:
        vals["theta"] = 0.0
    return vals


def synthesize_dataset(config: SynthesisConfig, seed: int) -> DesignDataset:
    """Build the synthetic training corpus: uniform samples plus augmented rows.

    Deterministic for a fixed (config, seed).
    """
    rng = np.random.default_rng(seed)
    n_random = max(1, round_half_up(config.count * config.random_fraction))
    n_random = min(n_random, config.count)
    n_aug = config.count - n_random

    sampled = [make_design(**_sample_independent(rng, config.bounds)) for _ in range(n_random)]
    rows = list(sampled)
    provenance = ["sampled"] * n_random
    if n_aug > 0:
        rows += _augment(sampled, n_aug, config.noise_scale, config.bounds, rng)
        provenance += ["augmented"] * n_aug
    return DesignDataset(tuple(rows), config.bounds, tuple(provenance))


def augment(
    seeds: list[DesignParams],
    count: int,
    noise_scale: float,
    bounds: ParameterBounds,
    seed: int,
) -> list[DesignParams]:
    """Jitter seed designs with bound-clipped Gaussian noise.

    Noise std per field is noise_scale * (upper - lower). alpha is kept at its
    seed value so augmentation never changes the actuation category.
    """
    if not seeds:
        raise ConfigError("augment requires at least one seed design")
    if not 0.0 < noise_scale <= 0.5:
        raise ConfigError(f"noise_scale must lie in (0, 0.5], got {noise_scale}")
    rng = np.random.default_rng(seed)
    return _augment(seeds, count, noise_scale, bounds, rng)


def _augment(
    seeds: list[DesignParams],
    count: int,
    noise_scale: float,
    bounds: ParameterBounds,
    rng: np.random.Generator,
) -> list[DesignParams]:
    out: list[DesignParams] = []
    for _ in range(count):
        base = seeds[int(rng.integers(0, len(seeds)))]
        vals: dict = {}
        for name in INDEPENDENT_FIELDS:
            if name == "alpha":
                vals["alpha"] = base.alpha
                continue
            fb = bounds[name]
            width = fb.upper - fb.lower
            v = float(getattr(base, name)) + float(rng.normal(0.0, noise_scale * width))
            v = min(max(v, fb.lower), fb.upper)
            if fb.integer:
                v = min(max(round_half_up(v), int(fb.lower)), int(fb.upper))
            vals[name] = v
        out.append(make_design(**vals))
    return out
