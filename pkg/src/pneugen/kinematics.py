"""Reduced-order screening kinematics: constant-curvature backbone per chamber.

Each chamber-plus-gap segment of length l = L + t_n deforms as a circular arc
whose angle grows linearly with pressure. Straight chambers bend about the
lateral axis, staying in the vertical plane. Inclined chambers convert part
of the same actuation into roll about the backbone (bend angle scales with
cos(theta), roll with sin(theta)), which is what makes a uniformly inclined
actuator coil out of plane instead of curling flat.

This is a qualitative screening model: it preserves planarity of pure
bending, torsion of twisting, and monotone growth of deformation with
pressure, but makes no quantitative deformation claims.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .design_space import DesignParams
from .errors import ConfigError, DataError
from .geometry import geometric_feasibility

MODE_DEGENERATE = "Degenerate"

# Classification thresholds: twist above TWIST_MIN_DEG counts as twisting
# motion; a trajectory whose accumulated turning exceeds TURN_TWIST_RATIO
# times its twist is bending-dominated enough to be called mixed.
TWIST_MIN_DEG = 5.0
TURN_TWIST_RATIO = 2.0
PLANARITY_MAX = 0.01
DISPLACEMENT_MIN_FRACTION = 0.01


@dataclass(frozen=True)
class KinematicsConfig:
    """Pressure-response settings.

    ``curvature_per_kpa`` converts pressure to bend angle per mm of segment
    and per unit stiffness factor. The default is sized so a twelve-chamber
    straight-chamber actuator of typical proportions reaches a tip rotation
    near a half turn at the top of the default pressure range; it is a
    screening placeholder, not a calibrated material property.
    """

    curvature_per_kpa: float = 1.5e-4  # rad / (mm * kPa), per unit stiffness factor
    pressures_kpa: tuple[float, ...] = (0.0, 20.0, 40.0, 60.0)
    samples_per_segment: int = 8
    classification_pressure_kpa: float = 40.0

    def __post_init__(self):
        if self.curvature_per_kpa <= 0.0:
            raise ConfigError("curvature_per_kpa must be positive")
        ps = self.pressures_kpa
        if any(p < 0.0 for p in ps) or any(b < a for a, b in zip(ps, ps[1:])):
            raise ConfigError("pressures must be non-negative and ascending")
        if self.samples_per_segment < 1:
            raise ConfigError("samples_per_segment must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Backbone polyline of a pressurized actuator, with material frames.

    ``points[0]`` is the clamped end at the origin; ``frames[i]`` maps local
    axes to world axes at point i (column 0 is the tangent). ``arc_length``
    is the inextensible backbone length.
    """

    points: np.ndarray  # (n, 3)
    frames: np.ndarray  # (n, 3, 3)
    pressure_kpa: float
    arc_length: float

    def tip(self) -> np.ndarray:
        return self.points[-1]

    def tip_displacement(self) -> float:
        undeformed = self.points[0] + self.frames[0][:, 0] * self.arc_length
        return float(np.linalg.norm(self.points[-1] - undeformed))


def stiffness_factor(p: DesignParams) -> float:
    """Monotone heuristic: taller/thinner chambers flex more, thick bases less."""
    return (p.H / p.t) * (p.W / (p.W + 2.0 * p.t_b))


def _rot_x(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _arc_translation(bend: float, length: float) -> np.ndarray:
    """Chord of a circular arc of given length bending about +y from +x."""
    if bend == 0.0:
        return np.array([length, 0.0, 0.0])
    r = length / bend
    return np.array([r * np.sin(bend), 0.0, -r * (1.0 - np.cos(bend))])


def segment_angles(p: DesignParams, chamber_index: int, pressure: float, cfg: KinematicsConfig) -> tuple[float, float]:
    """(bend, roll) angles for one chamber segment at the given pressure."""
    if not 0 <= chamber_index < p.N:
        raise DataError(f"chamber index {chamber_index} outside [0, {p.N})")
    if pressure < 0.0:
        raise DataError("pressure must be non-negative")
    seg_len = p.L + p.t_n
    phi = cfg.curvature_per_kpa * pressure * seg_len * stiffness_factor(p)
    helical = chamber_index >= p.N2  # straight chambers come first in the layout
    if helical:
        theta = np.radians(p.theta)
        return phi * np.cos(theta), phi * np.sin(theta)
    return phi, 0.0


def segment_transform(
    p: DesignParams, chamber_index: int, pressure: float, cfg: KinematicsConfig = KinematicsConfig()
) -> tuple[np.ndarray, np.ndarray]:
    """Rigid transform (rotation, translation) carried by one chamber segment.

    Zero pressure gives the identity rotation and a pure axial translation of
    the segment length.
    """
    bend, roll = segment_angles(p, chamber_index, pressure, cfg)
    seg_len = p.L + p.t_n
    rot = _rot_y(bend) @ _rot_x(roll)
    return rot, _arc_translation(bend, seg_len)


def backbone_trajectory(
    p: DesignParams, pressure: float, cfg: KinematicsConfig = KinematicsConfig()
) -> Trajectory:
    """Compose per-chamber arcs into the full backbone polyline."""
    report = geometric_feasibility(p)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures())
        raise DataError(f"infeasible design, failed checks: {names}")
    seg_len = p.L + p.t_n
    density = cfg.samples_per_segment
    points = [np.zeros(3)]
    frames = [np.eye(3)]
    origin = np.zeros(3)
    frame = np.eye(3)
    for k in range(p.N):
        bend, roll = segment_angles(p, k, pressure, cfg)
        for s in range(1, density + 1):
            frac = s / density
            local = _arc_translation(bend * frac, seg_len * frac)
            points.append(origin + frame @ local)
            frames.append(frame @ _rot_y(bend * frac) @ _rot_x(roll * frac))
        origin = points[-1]
        frame = frames[-1]
        if (k + 1) % 16 == 0:
            # Re-orthonormalize via polar decomposition to stop drift.
            u, _, vt = np.linalg.svd(frame)
            frame = u @ vt
    return Trajectory(
        points=np.array(points),
        frames=np.array(frames),
        pressure_kpa=float(pressure),
        arc_length=float(p.N * seg_len),
    )


def trajectory_sweep(p: DesignParams, cfg: KinematicsConfig = KinematicsConfig()) -> list[Trajectory]:
    """One trajectory per configured pressure, ascending."""
    return [backbone_trajectory(p, pressure, cfg) for pressure in cfg.pressures_kpa]


def _twist_and_turning(tr: Trajectory) -> tuple[float, float]:
    """Accumulated material twist about the tangent, and accumulated turning.

    Twist is measured against the parallel-transported frame, which carries no
    roll by construction; turning is the sum of angles between consecutive
    tangents.
    """
    tangents = tr.frames[:, :, 0]
    pt = tr.frames[0].copy()
    twist = 0.0
    turning = 0.0
    for i in range(1, len(tr.frames)):
        t_prev, t_next = tangents[i - 1], tangents[i]
        axis = np.cross(t_prev, t_next)
        norm = np.linalg.norm(axis)
        dot = float(np.clip(np.dot(t_prev, t_next), -1.0, 1.0))
        angle = float(np.arctan2(norm, dot))
        turning += angle
        if norm > 1e-15:
            axis = axis / norm
            k = np.array(
                [[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]]
            )
            align = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
            pt = align @ pt
        rel = pt.T @ tr.frames[i]
        # rel is a rotation about local x up to float error; its roll angle is
        # the twist relative to parallel transport at this sample.
        step = float(np.arctan2(rel[2, 1], rel[2, 2]))
        twist += step
        pt = tr.frames[i]  # re-anchor so each step stays small and unwrapped
    return twist, turning


def classify_mode(tr: Trajectory) -> str:
    """Label a trajectory Bending / Twisting / Mixed / Degenerate.

    A barely-moving tip is degenerate. A planar, roll-free curve is bending.
    Otherwise the accumulated roll and turning compete: twist-dominated
    motion is twisting, substantial bending on top of twist is mixed.
    """
    if tr.points.shape[0] < 4:
        raise DataError("classification needs at least 4 trajectory points")
    if tr.tip_displacement() < DISPLACEMENT_MIN_FRACTION * tr.arc_length:
        return MODE_DEGENERATE
    centered = tr.points - tr.points.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    planarity = float(svals[-1] / svals[0]) if svals[0] > 0.0 else 0.0
    twist, turning = _twist_and_turning(tr)
    twist_deg = abs(np.degrees(twist))
    turning_deg = abs(np.degrees(turning))
    if planarity < PLANARITY_MAX and twist_deg < TWIST_MIN_DEG:
        return "Bending"
    if twist_deg >= TWIST_MIN_DEG and turning_deg < TURN_TWIST_RATIO * twist_deg:
        return "Twisting"
    return "Mixed"


def write_trajectory_csv(path: str | Path, trajectories: list[Trajectory]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pressure_kpa", "point_index", "x", "y", "z"])
        for tr in trajectories:
            for i, pt in enumerate(tr.points):
                writer.writerow(
                    [repr(tr.pressure_kpa), i, repr(float(pt[0])), repr(float(pt[1])), repr(float(pt[2]))]
                )


def read_trajectory_csv(path: str | Path) -> dict[float, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"trajectory file not found: {path}")
    out: dict[float, list[list[float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["pressure_kpa", "point_index", "x", "y", "z"]:
            raise DataError(f"unexpected trajectory CSV header in {path}")
        for rec in reader:
            if not rec:
                continue
            out.setdefault(float(rec[0]), []).append([float(rec[2]), float(rec[3]), float(rec[4])])
    return {k: np.array(v) for k, v in out.items()}
