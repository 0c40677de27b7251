"""Geometric artifacts for a design: layout, feasibility checks, CSG script, STL mesh.

Frame convention: x runs along the actuator axis, y across the width
(centered on zero), z up. The base slab sits on z=0 and chambers stand on
top of it. Helical chambers are rotated about the vertical axis through
their own center.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .design_space import DesignParams
from .errors import DataError, NumericError

# Air channel cross-section: fixed fraction of the chamber width, running
# through the inter-chamber walls at base level.
CHANNEL_WIDTH_FRACTION = 1.0 / 3.0


@dataclass(frozen=True)
class ChamberPlacement:
    index: int
    axial_center: float  # mm along x
    orientation_deg: float  # 0 for straight chambers
    length: float
    width: float
    height: float
    wall: float
    head: float


@dataclass(frozen=True)
class ActuatorLayout:
    """Chamber placements plus the shared base slab.

    Straight chambers come first along the axis, helical ones after, so a
    mixed design reads straight-then-helical from the clamped end.
    """

    chambers: tuple[ChamberPlacement, ...]
    base_length: float
    base_width: float
    base_thickness: float
    channel_wall: float

    @property
    def part_count(self) -> int:
        """Solid preview parts: one box per chamber plus the base slab."""
        return len(self.chambers) + 1

    @property
    def axial_extent(self) -> float:
        last = self.chambers[-1]
        return last.axial_center + last.length / 2.0


@dataclass(frozen=True)
class FeasibilityCheck:
    name: str
    passed: bool
    margin: float
    detail: str

    def __post_init__(self):
        # Comparisons upstream may yield numpy scalars; keep payloads JSON-clean.
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "margin", float(self.margin))


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[FeasibilityCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[FeasibilityCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "margin": c.margin, "detail": c.detail}
                for c in self.checks
            ],
        }


def geometric_feasibility(p: DesignParams) -> FeasibilityReport:
    """Manufacturability screening; failures are data, not errors.

    Margins are the signed slack of each strict inequality, so a value of
    exactly zero fails.
    """
    theta = np.radians(p.theta)
    footprint = p.L * np.sin(theta) + p.W * np.cos(theta)
    checks = [
        FeasibilityCheck(
            "cavity_length", p.L - 2 * p.t > 0.0, p.L - 2 * p.t,
            "chamber interior needs L > 2t",
        ),
        FeasibilityCheck(
            "cavity_width", p.W - 2 * p.t > 0.0, p.W - 2 * p.t,
            "chamber interior needs W > 2t",
        ),
        FeasibilityCheck(
            "cavity_height", p.H - (p.t_h + p.t_ab) > 0.0, p.H - (p.t_h + p.t_ab),
            "chamber interior needs H > t_h + t_ab",
        ),
        FeasibilityCheck(
            "channel_height", p.H - p.t_ab > 0.0, p.H - p.t_ab,
            "air channel needs t_ab < H",
        ),
        FeasibilityCheck(
            "inclined_footprint", 1.5 * p.W - footprint >= 0.0, 1.5 * p.W - footprint,
            "rotated chamber must stay within 1.5x the actuator width",
        ),
    ]
    positivity = [
        FeasibilityCheck(
            f"positive_{name}", getattr(p, name) > 0.0, float(getattr(p, name)),
            f"{name} must be strictly positive",
        )
        for name in ("L", "W", "H", "t", "t_n", "t_h", "t_ab", "t_b")
    ]
    structural = [
        FeasibilityCheck("chamber_count", p.N >= 1, float(p.N - 1), "at least one chamber"),
        FeasibilityCheck(
            "helical_fraction", 0.0 <= p.alpha <= 1.0, min(p.alpha, 1.0 - p.alpha),
            "alpha must lie in [0, 1]",
        ),
        FeasibilityCheck(
            "count_split", p.N1 + p.N2 == p.N, float(p.N - p.N1 - p.N2),
            "chamber counts must sum to N",
        ),
    ]
    return FeasibilityReport(tuple(checks + positivity + structural))


def layout(p: DesignParams) -> ActuatorLayout:
    """Place chambers along the axis: N2 straight ones, then N1 at theta."""
    report = geometric_feasibility(p)
    if not report.ok:
        names = ", ".join(c.name for c in report.failures())
        raise DataError(f"infeasible design, failed checks: {names}")
    chambers = []
    for i in range(p.N):
        orientation = 0.0 if i < p.N2 else float(p.theta)
        chambers.append(
            ChamberPlacement(
                index=i,
                axial_center=i * (p.L + p.t_n) + p.L / 2.0,
                orientation_deg=orientation,
                length=p.L,
                width=p.W,
                height=p.H,
                wall=p.t,
                head=p.t_h,
            )
        )
    return ActuatorLayout(
        chambers=tuple(chambers),
        base_length=p.L_T,
        base_width=p.W,
        base_thickness=p.t_b,
        channel_wall=p.t_ab,
    )


def _f(x: float) -> str:
    return repr(round(float(x), 6))


def export_csg_script(p: DesignParams) -> str:
    """Emit a constructive-solid-geometry script that rebuilds the actuator.

    Text is deterministic for a given design: box/difference/rotate_z/union
    primitives, one difference per hollow chamber plus the base slab.
    """
    lay = layout(p)
    lines = [
        "// pneu-net actuator, constructive solid geometry",
        "// units: mm; x along actuator axis, y across width, z up",
        f"// chambers: {p.N} ({p.N2} straight, {p.N1} helical at {_f(p.theta)} deg), "
        f"total length {_f(p.L_T)} mm",
        f"base = box(size=[{_f(lay.base_length)}, {_f(lay.base_width)}, {_f(lay.base_thickness)}], "
        f"at=[{_f(lay.base_length / 2)}, 0.0, {_f(lay.base_thickness / 2)}]);",
    ]
    names = ["base"]
    cavity_h = p.H - p.t_h
    port_h = p.H - p.t_h - p.t_ab
    port_w = p.W * CHANNEL_WIDTH_FRACTION
    z0 = p.t_b
    for ch in lay.chambers:
        cx = ch.axial_center
        name = f"chamber_{ch.index:02d}"
        parts = [
            f"    box(size=[{_f(p.L)}, {_f(p.W)}, {_f(p.H)}], "
            f"at=[{_f(cx)}, 0.0, {_f(z0 + p.H / 2)}]),",
            f"    box(size=[{_f(p.L - 2 * p.t)}, {_f(p.W - 2 * p.t)}, {_f(cavity_h)}], "
            f"at=[{_f(cx)}, 0.0, {_f(z0 + cavity_h / 2)}]),",
        ]
        # Air channel ports pierce the walls shared with the neighbor gaps.
        if ch.index > 0:
            parts.append(
                f"    box(size=[{_f(p.t)}, {_f(port_w)}, {_f(port_h)}], "
                f"at=[{_f(cx - p.L / 2 + p.t / 2)}, 0.0, {_f(z0 + port_h / 2)}]),"
            )
        if ch.index < p.N - 1:
            parts.append(
                f"    box(size=[{_f(p.t)}, {_f(port_w)}, {_f(port_h)}], "
                f"at=[{_f(cx + p.L / 2 - p.t / 2)}, 0.0, {_f(z0 + port_h / 2)}]),"
            )
        lines.append(f"{name} = difference(")
        lines += parts
        lines.append(");")
        lines.append(
            f"{name} = rotate_z(angle={_f(ch.orientation_deg)}, "
            f"about=[{_f(cx)}, 0.0], solid={name});"
        )
        names.append(name)
    lines.append(f"actuator = union({', '.join(names)});")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MeshModel:
    """Triangle soup with outward unit normals, mm units."""

    triangles: np.ndarray  # (T, 3, 3)
    normals: np.ndarray  # (T, 3)

    def __post_init__(self):
        tri = self.triangles
        if tri.ndim != 3 or tri.shape[1:] != (3, 3):
            raise DataError(f"triangles must have shape (T, 3, 3), got {tri.shape}")
        e1 = tri[:, 1] - tri[:, 0]
        e2 = tri[:, 2] - tri[:, 0]
        areas = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)
        if np.any(areas <= 1e-9):
            raise NumericError("mesh contains a degenerate triangle")
        norms = np.linalg.norm(self.normals, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise NumericError("mesh normals must be unit length")

    @property
    def triangle_count(self) -> int:
        return self.triangles.shape[0]


# Unit box faces as vertex-index triples, wound counter-clockwise seen from
# outside; corner k has coordinates (k&1, (k>>1)&1, (k>>2)&1).
_BOX_FACES = (
    (0, 2, 1), (1, 2, 3),  # z = 0
    (4, 5, 6), (5, 7, 6),  # z = 1
    (0, 1, 4), (1, 5, 4),  # y = 0
    (2, 6, 3), (3, 6, 7),  # y = 1
    (0, 4, 2), (2, 4, 6),  # x = 0
    (1, 3, 5), (3, 7, 5),  # x = 1
)


def _box_triangles(center: np.ndarray, size: np.ndarray, yaw_deg: float, pivot: np.ndarray) -> np.ndarray:
    corners = np.array(
        [[(k & 1) - 0.5, ((k >> 1) & 1) - 0.5, ((k >> 2) & 1) - 0.5] for k in range(8)]
    )
    corners = corners * size + center
    if yaw_deg != 0.0:
        a = np.radians(yaw_deg)
        rot = np.array([[np.cos(a), -np.sin(a), 0.0], [np.sin(a), np.cos(a), 0.0], [0.0, 0.0, 1.0]])
        corners = (corners - pivot) @ rot.T + pivot
    return np.array([[corners[i], corners[j], corners[k]] for i, j, k in _BOX_FACES])


def part_boxes(lay: ActuatorLayout) -> list[tuple[np.ndarray, np.ndarray, float, np.ndarray]]:
    """Preview solids as (center, size, yaw, pivot) boxes: base slab then chambers."""
    parts = [
        (
            np.array([lay.base_length / 2, 0.0, lay.base_thickness / 2]),
            np.array([lay.base_length, lay.base_width, lay.base_thickness]),
            0.0,
            np.zeros(3),
        )
    ]
    for ch in lay.chambers:
        center = np.array([ch.axial_center, 0.0, lay.base_thickness + ch.height / 2])
        pivot = np.array([ch.axial_center, 0.0, 0.0])
        parts.append((center, np.array([ch.length, ch.width, ch.height]), ch.orientation_deg, pivot))
    return parts


def build_mesh(p: DesignParams) -> MeshModel:
    """Preview mesh: each part tessellated as a rotated box, 12 triangles apiece.

    Parts are concatenated without boolean union, which is enough for a
    visual check and keeps the triangle count exactly 12 * part count.
    """
    lay = layout(p)
    tris = np.concatenate([_box_triangles(c, s, yaw, piv) for c, s, yaw, piv in part_boxes(lay)])
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    normals = np.cross(e1, e2)
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    return MeshModel(tris, normals)


def export_stl(mesh: MeshModel, path: str | Path) -> None:
    """Write binary little-endian STL: 80-byte header, uint32 count, 50-byte triangles."""
    record = np.zeros(
        mesh.triangle_count,
        dtype=[("normal", "<3f4"), ("v0", "<3f4"), ("v1", "<3f4"), ("v2", "<3f4"), ("attr", "<u2")],
    )
    record["normal"] = mesh.normals.astype("<f4")
    record["v0"] = mesh.triangles[:, 0].astype("<f4")
    record["v1"] = mesh.triangles[:, 1].astype("<f4")
    record["v2"] = mesh.triangles[:, 2].astype("<f4")
    with open(path, "wb") as fh:
        fh.write(b"pneugen preview mesh".ljust(80, b"\0"))
        fh.write(struct.pack("<I", mesh.triangle_count))
        record.tofile(fh)


def stl_bytes(mesh: MeshModel) -> bytes:
    import io

    buf = io.BytesIO()
    record = np.zeros(
        mesh.triangle_count,
        dtype=[("normal", "<3f4"), ("v0", "<3f4"), ("v1", "<3f4"), ("v2", "<3f4"), ("attr", "<u2")],
    )
    record["normal"] = mesh.normals.astype("<f4")
    record["v0"] = mesh.triangles[:, 0].astype("<f4")
    record["v1"] = mesh.triangles[:, 1].astype("<f4")
    record["v2"] = mesh.triangles[:, 2].astype("<f4")
    buf.write(b"pneugen preview mesh".ljust(80, b"\0"))
    buf.write(struct.pack("<I", mesh.triangle_count))
    buf.write(record.tobytes())
    return buf.getvalue()


def read_stl(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a binary STL back into (triangles, normals), float32 precision."""
    raw = Path(path).read_bytes()
    if len(raw) < 84:
        raise DataError("file too short to be a binary STL")
    (count,) = struct.unpack_from("<I", raw, 80)
    expected = 84 + 50 * count
    if len(raw) != expected:
        raise DataError(f"binary STL size mismatch: {len(raw)} bytes, expected {expected}")
    record = np.frombuffer(
        raw,
        dtype=[("normal", "<3f4"), ("v0", "<3f4"), ("v1", "<3f4"), ("v2", "<3f4"), ("attr", "<u2")],
        count=count,
        offset=84,
    )
    tris = np.stack([record["v0"], record["v1"], record["v2"]], axis=1).astype(float)
    return tris, record["normal"].astype(float)
