"""Scene representation, bounding boxes and the relation coordinate frame.

World axes are fixed: +x is "right", +y is "behind", +z is "up". All lengths
are meters. Object geometry is an axis-aligned box attached to a pose; only
the yaw component of an orientation affects the footprint.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EmptyReferenceSet, UnknownObject

Vec3 = tuple[float, float, float]

# Floors keep normalized coordinates finite for flat or thin reference objects.
MIN_HORIZONTAL_SCALE = 0.01
MIN_VERTICAL_SCALE = 0.01


@dataclass(frozen=True)
class ObjectModel:
    """Catalog entry: box geometry plus the name used for language grounding."""

    id: str
    name: str
    extents: Vec3  # full extents (x, y, z)

    def __post_init__(self):
        if any(e <= 0 for e in self.extents):
            raise ValueError(f"extents must be positive, got {self.extents}")


@dataclass(frozen=True)
class Pose:
    position: Vec3
    orientation: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)  # wxyz

    def __post_init__(self):
        norm = math.sqrt(sum(q * q for q in self.orientation))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"quaternion norm {norm} is not 1")

    @property
    def yaw(self) -> float:
        w, x, y, z = self.orientation
        return math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))

    @staticmethod
    def from_yaw(position: Vec3, yaw: float = 0.0) -> "Pose":
        half = 0.5 * yaw
        return Pose(position, (math.cos(half), 0.0, 0.0, math.sin(half)))


@dataclass(frozen=True)
class Scene:
    """Object poses at one point in time; ids must resolve in a catalog."""

    timestamp: float
    instances: Mapping[str, Pose]

    def pose(self, object_id: str) -> Pose:
        try:
            return self.instances[object_id]
        except KeyError:
            raise UnknownObject(f"object {object_id!r} not in scene") from None

    def with_pose(self, object_id: str, pose: Pose, timestamp: float | None = None) -> "Scene":
        if object_id not in self.instances:
            raise UnknownObject(f"object {object_id!r} not in scene")
        updated = dict(self.instances)
        updated[object_id] = pose
        return Scene(self.timestamp if timestamp is None else timestamp, updated)


@dataclass(frozen=True)
class AABB:
    min: Vec3
    max: Vec3

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.min, self.max)):
            raise ValueError(f"AABB min {self.min} exceeds max {self.max}")

    @property
    def extents(self) -> Vec3:
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))

    @property
    def center(self) -> Vec3:
        return tuple(0.5 * (lo + hi) for lo, hi in zip(self.min, self.max))

    def contains_xy(self, x: float, y: float) -> bool:
        return self.min[0] <= x <= self.max[0] and self.min[1] <= y <= self.max[1]

    def union(self, other: "AABB") -> "AABB":
        return AABB(
            tuple(min(a, b) for a, b in zip(self.min, other.min)),
            tuple(max(a, b) for a, b in zip(self.max, other.max)),
        )


@dataclass(frozen=True)
class RelationFrame:
    """Cylindrical frame anchored at the bottom-projected centroid of the
    reference objects' joint bounding box. Axes are the fixed world axes."""

    origin: Vec3
    horizontal_scale: float
    vertical_scale: float

    def __post_init__(self):
        if self.horizontal_scale < MIN_HORIZONTAL_SCALE - 1e-12:
            raise ValueError("horizontal_scale below floor")
        if self.vertical_scale < MIN_VERTICAL_SCALE - 1e-12:
            raise ValueError("vertical_scale below floor")


@dataclass(frozen=True)
class CylCoords:
    """Normalized cylindrical coordinates: dimensionless radius, azimuth in
    [-pi, pi], signed dimensionless height."""

    r: float
    phi: float
    h: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radius must be >= 0")
        if not -math.pi <= self.phi <= math.pi:
            raise ValueError("phi must be wrapped into [-pi, pi]")


def wrap_angle(phi: float) -> float:
    """Wrap an angle into [-pi, pi]."""
    wrapped = math.remainder(phi, 2.0 * math.pi)
    # remainder maps pi to -pi; keep both endpoints representable
    return wrapped


class ObjectCatalog:
    """Immutable id -> ObjectModel lookup."""

    def __init__(self, models: Iterable[ObjectModel]):
        self._models: dict[str, ObjectModel] = {}
        for m in models:
            if m.id in self._models:
                raise ValueError(f"duplicate object id {m.id!r}")
            self._models[m.id] = m

    def get(self, object_id: str) -> ObjectModel:
        try:
            return self._models[object_id]
        except KeyError:
            raise UnknownObject(f"object {object_id!r} not in catalog") from None

    def __contains__(self, object_id: str) -> bool:
        return object_id in self._models

    def __iter__(self):
        return iter(self._models.values())

    def __len__(self) -> int:
        return len(self._models)

    def ids(self) -> list[str]:
        return list(self._models)


def world_aabb(model: ObjectModel, pose: Pose) -> AABB:
    """Axis-aligned box containing the object's box rotated by the pose yaw.

    Pitch/roll components of the orientation are ignored; geometry in this
    package is 2.5D (yaw-rotated boxes resting on horizontal surfaces).
    """
    hx, hy, hz = (e * 0.5 for e in model.extents)
    c = abs(math.cos(pose.yaw))
    s = abs(math.sin(pose.yaw))
    ax = c * hx + s * hy
    ay = s * hx + c * hy
    px, py, pz = pose.position
    return AABB((px - ax, py - ay, pz - hz), (px + ax, py + ay, pz + hz))


def build_relation_frame(catalog: ObjectCatalog, scene: Scene, references: Iterable[str]) -> RelationFrame:
    """Construct the cylindrical frame for a set of reference objects.

    The origin is the bottom-projected centroid of the union AABB of all
    references; the horizontal scale is half the horizontal diagonal of that
    box and the vertical scale its full height, both floored at 1 cm.
    """
    refs = list(references)
    if not refs:
        raise EmptyReferenceSet("relation frame needs at least one reference")
    box: AABB | None = None
    for ref in refs:
        b = world_aabb(catalog.get(ref), scene.pose(ref))
        box = b if box is None else box.union(b)
    ext = box.extents
    cx, cy, _ = box.center
    origin = (cx, cy, box.min[2])
    horizontal = max(MIN_HORIZONTAL_SCALE, 0.5 * math.hypot(ext[0], ext[1]))
    vertical = max(MIN_VERTICAL_SCALE, ext[2])
    return RelationFrame(origin, horizontal, vertical)


def to_cylindrical(frame: RelationFrame, world_point: Vec3) -> CylCoords:
    """Express a world point in the frame's normalized cylindrical coordinates.

    A point on the frame axis (r = 0) gets phi = 0 by convention.
    """
    dx = world_point[0] - frame.origin[0]
    dy = world_point[1] - frame.origin[1]
    dz = world_point[2] - frame.origin[2]
    r = math.hypot(dx, dy) / frame.horizontal_scale
    phi = math.atan2(dy, dx) if r > 0 else 0.0
    h = dz / frame.vertical_scale
    return CylCoords(r, phi, h)


def from_cylindrical(frame: RelationFrame, c: CylCoords) -> Vec3:
    """Inverse of :func:`to_cylindrical`."""
    rho = c.r * frame.horizontal_scale
    return (
        frame.origin[0] + rho * math.cos(c.phi),
        frame.origin[1] + rho * math.sin(c.phi),
        frame.origin[2] + c.h * frame.vertical_scale,
    )


# -- serialization (objects.json and scene files) ----------------------------

def object_to_dict(model: ObjectModel) -> dict:
    return {"id": model.id, "name": model.name, "extents_m": list(model.extents)}


def object_from_dict(d: dict) -> ObjectModel:
    return ObjectModel(d["id"], d["name"], tuple(float(v) for v in d["extents_m"]))


def catalog_to_json(catalog: ObjectCatalog) -> str:
    return json.dumps([object_to_dict(m) for m in catalog], indent=2)


def catalog_from_json(text: str) -> ObjectCatalog:
    return ObjectCatalog(object_from_dict(d) for d in json.loads(text))


def scene_to_dict(scene: Scene) -> dict:
    return {
        "timestamp": scene.timestamp,
        "instances": [
            {
                "id": oid,
                "position_m": list(pose.position),
                "orientation_wxyz": list(pose.orientation),
            }
            for oid, pose in scene.instances.items()
        ],
    }


def scene_from_dict(d: dict) -> Scene:
    instances: dict[str, Pose] = {}
    for inst in d["instances"]:
        oid = inst["id"]
        if oid in instances:
            raise ValueError(f"duplicate object id {oid!r} in scene")
        instances[oid] = Pose(
            tuple(float(v) for v in inst["position_m"]),
            tuple(float(v) for v in inst["orientation_wxyz"]),
        )
    return Scene(float(d["timestamp"]), instances)
