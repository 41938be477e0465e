"""Placement planning: sample candidates from a relation model, filter for
feasibility, rank by density, pick the best.

Feasibility is 2.5D: a candidate must keep the target inside the workspace
bounds, rest it on a table top or another object's top face (its height is
snapped to that surface), and stay collision-free against all other objects'
yaw-rotated footprints, inflated by a safety margin and tested at several
hypothetical rotations of the target around the vertical axis.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .geometry import (
    AABB,
    ObjectCatalog,
    Scene,
    Vec3,
    build_relation_frame,
    from_cylindrical,
    to_cylindrical,
    world_aabb,
)
from .relations import RelationCommand, RelationModel
from .seeding import rng_from

REASON_OUT_OF_BOUNDS = "out_of_bounds"
REASON_UNSUPPORTED = "unsupported"
REASON_COLLISION = "collision"


@dataclass(frozen=True)
class Workspace:
    """Table tops that can support objects plus the allowed placement region."""

    tables: list[AABB]
    bounds: AABB

    def __post_init__(self):
        for i, a in enumerate(self.tables):
            for b in self.tables[i + 1 :]:
                if (
                    a.min[0] < b.max[0]
                    and b.min[0] < a.max[0]
                    and a.min[1] < b.max[1]
                    and b.min[1] < a.max[1]
                ):
                    raise ValueError("table surfaces must not overlap in xy")


@dataclass(frozen=True)
class PlanConfig:
    candidate_count: int = 50
    collision_margin: float = 0.025
    rotation_checks: int = 8
    support_snap: float = 0.02
    seed: int = 0
    # Rank by the density in normalized cylindrical space by default; with
    # jacobian_ranking the r-dependent volume factor of the cylindrical-to-
    # Cartesian map is divided out.
    jacobian_ranking: bool = False

    def __post_init__(self):
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be >= 1")
        if self.collision_margin < 0:
            raise ValueError("collision_margin must be >= 0")
        if self.rotation_checks < 1:
            raise ValueError("rotation_checks must be >= 1")


class PlanStatus(Enum):
    SUCCESS = "success"
    NO_MODEL = "no_model"
    NO_FEASIBLE_CANDIDATE = "no_feasible_candidate"


@dataclass(frozen=True)
class Verdict:
    passed: bool
    reason: str | None
    position: Vec3  # support-snapped when passed


@dataclass(frozen=True)
class Candidate:
    position: Vec3
    density: float
    verdict: Verdict


@dataclass(frozen=True)
class PlanResult:
    status: PlanStatus
    chosen: Vec3 | None
    candidates: list[Candidate] = field(default_factory=list)


class _Rect:
    """Oriented rectangle in the plane: center, unit axes, half extents."""

    __slots__ = ("cx", "cy", "ux", "uy", "hx", "hy")

    def __init__(self, cx, cy, yaw, hx, hy):
        self.cx = cx
        self.cy = cy
        self.ux = math.cos(yaw)
        self.uy = math.sin(yaw)
        self.hx = hx
        self.hy = hy

    def contains(self, x: float, y: float) -> bool:
        dx = x - self.cx
        dy = y - self.cy
        return (
            abs(dx * self.ux + dy * self.uy) <= self.hx
            and abs(-dx * self.uy + dy * self.ux) <= self.hy
        )


class FeasibilityChecker:
    """Precomputed per-(scene, target) data for batched feasibility checks.

    Building the checker once per plan keeps the single-candidate check and
    the 50-candidate batch on the same code path.
    """

    def __init__(
        self,
        catalog: ObjectCatalog,
        scene: Scene,
        target_id: str,
        workspace: Workspace,
        config: PlanConfig,
    ):
        self.workspace = workspace
        self.config = config
        target = catalog.get(target_id)
        self.target_half = (target.extents[0] * 0.5, target.extents[1] * 0.5)
        self.target_half_z = target.extents[2] * 0.5
        self.target_yaw = scene.pose(target_id).yaw if target_id in scene.instances else 0.0

        obstacles = []
        for oid, pose in scene.instances.items():
            if oid == target_id:
                continue
            model = catalog.get(oid)
            box = world_aabb(model, pose)
            rect = _Rect(
                pose.position[0],
                pose.position[1],
                pose.yaw,
                model.extents[0] * 0.5,
                model.extents[1] * 0.5,
            )
            obstacles.append((rect, box.min[2], box.max[2]))
        self.obstacles = obstacles

        # Support surfaces: table tops plus obstacle top faces.
        self.surfaces: list[tuple[_Rect, float]] = []
        for table in workspace.tables:
            cx, cy, _ = table.center
            ext = table.extents
            self.surfaces.append((_Rect(cx, cy, 0.0, ext[0] * 0.5, ext[1] * 0.5), table.max[2]))
        for rect, _, top in obstacles:
            self.surfaces.append((rect, top))

        # Collision geometry is shared across candidates: axes and projected
        # half-extent sums depend only on (rotation, obstacle), not on the
        # candidate position.
        k = config.rotation_checks
        margin = config.collision_margin
        tx = self.target_half[0] + margin
        ty = self.target_half[1] + margin
        self._pairs: list[list[tuple[float, float, float]]] = []  # per obstacle: (ax, ay, thr)
        for rect, _, _ in obstacles:
            tests: list[tuple[float, float, float]] = []
            oux, ouy = rect.ux, rect.uy
            ovx, ovy = -ouy, oux
            for i in range(k):
                yaw = self.target_yaw + i * (2.0 * math.pi / k)
                ux, uy = math.cos(yaw), math.sin(yaw)
                vx, vy = -uy, ux
                # separating-axis thresholds: own half extent + the other
                # rectangle's half extents projected onto the axis
                tests.append((ux, uy, tx + abs(oux * ux + ouy * uy) * rect.hx + abs(ovx * ux + ovy * uy) * rect.hy))
                tests.append((vx, vy, ty + abs(oux * vx + ouy * vy) * rect.hx + abs(ovx * vx + ovy * vy) * rect.hy))
                tests.append((oux, ouy, rect.hx + abs(ux * oux + uy * ouy) * tx + abs(vx * oux + vy * ouy) * ty))
                tests.append((ovx, ovy, rect.hy + abs(ux * ovx + uy * ovy) * tx + abs(vx * ovx + vy * ovy) * ty))
            self._pairs.append(tests)

    def _snap(self, x: float, y: float, z: float) -> float | None:
        """Return the supporting surface height for (x, y, z), or None."""
        bottom = z - self.target_half_z
        best = None
        for rect, top in self.surfaces:
            if rect.contains(x, y):
                delta = abs(bottom - top)
                if delta <= self.config.support_snap and (best is None or delta < abs(bottom - best)):
                    best = top
        return best

    def _collides(self, x: float, y: float, bottom: float) -> bool:
        top = bottom + 2.0 * self.target_half_z
        for (rect, zlo, zhi), tests in zip(self.obstacles, self._pairs):
            if bottom >= zhi - 1e-9 or top <= zlo + 1e-9:
                continue
            dx = x - rect.cx
            dy = y - rect.cy
            k = self.config.rotation_checks
            for i in range(k):
                overlap = True
                for ax, ay, thr in tests[4 * i : 4 * i + 4]:
                    if abs(dx * ax + dy * ay) >= thr:
                        overlap = False
                        break
                if overlap:
                    return True
        return False

    def check(self, candidate: Sequence[float]) -> Verdict:
        x, y, z = (float(v) for v in candidate)

        # (a) in bounds: the target's swept AABB at its kept yaw
        c = abs(math.cos(self.target_yaw))
        s = abs(math.sin(self.target_yaw))
        ax = c * self.target_half[0] + s * self.target_half[1]
        ay = s * self.target_half[0] + c * self.target_half[1]
        b = self.workspace.bounds
        if not (b.min[0] <= x - ax and x + ax <= b.max[0] and b.min[1] <= y - ay and y + ay <= b.max[1]):
            return Verdict(False, REASON_OUT_OF_BOUNDS, (x, y, z))

        # (b) supported: snap the height onto the closest surface
        surface = self._snap(x, y, z)
        if surface is None:
            return Verdict(False, REASON_UNSUPPORTED, (x, y, z))
        z = surface + self.target_half_z

        # (c) collision-free at every hypothetical rotation
        if self._collides(x, y, surface):
            return Verdict(False, REASON_COLLISION, (x, y, z))
        return Verdict(True, None, (x, y, z))


def check_feasible(
    catalog: ObjectCatalog,
    scene: Scene,
    target_id: str,
    candidate: Sequence[float],
    workspace: Workspace,
    config: PlanConfig,
) -> Verdict:
    """Feasibility verdict for placing `target_id` at `candidate`.

    The target's current scene instance, if any, is excluded from the
    obstacle set (it is the object being moved).
    """
    return FeasibilityChecker(catalog, scene, target_id, workspace, config).check(candidate)


def plan(
    catalog: ObjectCatalog,
    scene: Scene,
    command: RelationCommand,
    model: RelationModel | None,
    workspace: Workspace,
    config: PlanConfig,
    rng: np.random.Generator | None = None,
) -> PlanResult:
    """Generate, filter and rank placement candidates for a command.

    Without a model the result is NO_MODEL (the caller should query for a
    demonstration). Otherwise `candidate_count` positions are sampled from
    the model, checked for feasibility, and the feasible one with the highest
    density wins; ties break on the lowest candidate index.
    """
    scene.pose(command.target)  # raises UnknownObject early
    for ref in command.references:
        scene.pose(ref)
    if model is None or model.theta is None:
        return PlanResult(PlanStatus.NO_MODEL, None)
    theta = model.theta
    frame = build_relation_frame(catalog, scene, command.references)
    if rng is None:
        rng = rng_from("plan", config.seed)
    samples = theta.sample(rng, size=config.candidate_count)

    checker = FeasibilityChecker(catalog, scene, command.target, workspace, config)
    candidates: list[Candidate] = []
    best_index = -1
    best_density = -math.inf
    for i in range(samples.shape[0]):
        c_sampled = samples[i]
        pos = from_cylindrical(frame, _as_cyl(c_sampled))
        verdict = checker.check(pos)
        # density of what would actually be executed (after the height snap)
        c_final = to_cylindrical(frame, verdict.position)
        density = float(theta.pdf(c_final))
        if config.jacobian_ranking:
            density /= max(c_final.r, 1e-9) * frame.horizontal_scale**2 * frame.vertical_scale
        candidates.append(Candidate(verdict.position, density, verdict))
        if verdict.passed and density > best_density:
            best_density = density
            best_index = i
    if best_index < 0:
        return PlanResult(PlanStatus.NO_FEASIBLE_CANDIDATE, None, candidates)
    return PlanResult(PlanStatus.SUCCESS, candidates[best_index].position, candidates)


def _as_cyl(row: np.ndarray):
    from .geometry import CylCoords, wrap_angle

    return CylCoords(float(row[0]), wrap_angle(float(row[1])), float(row[2]))


# -- workspace file (workspace.json) ------------------------------------------

def _aabb_to_list(box: AABB) -> list[list[float]]:
    return [list(box.min), list(box.max)]


def _aabb_from_list(v: list) -> AABB:
    return AABB(tuple(float(x) for x in v[0]), tuple(float(x) for x in v[1]))


def workspace_to_json(ws: Workspace) -> str:
    return json.dumps(
        {"tables": [_aabb_to_list(t) for t in ws.tables], "bounds": _aabb_to_list(ws.bounds)},
        indent=2,
    )


def workspace_from_json(text: str) -> Workspace:
    d = json.loads(text)
    return Workspace([_aabb_from_list(t) for t in d["tables"]], _aabb_from_list(d["bounds"]))
