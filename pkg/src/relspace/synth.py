"""Synthetic tabletop world: default catalogs, per-relation ground-truth
distributions, and a demonstration generator.

The generator stands in for a human demonstrator: it builds random initial
scenes (references, the target, optional distractor objects), samples the
target's final position from the relation's ground-truth distribution, and
keeps only placements that pass the planner's feasibility check — exactly
the kind of sample a person manipulating the scene would produce.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InfeasibleGeneration
from .geometry import (
    AABB,
    ObjectCatalog,
    ObjectModel,
    Pose,
    Scene,
    build_relation_frame,
    from_cylindrical,
)
from .grounding import GroundingCatalog
from .planner import FeasibilityChecker, PlanConfig, Workspace
from .relations import Demonstration, RelationCommand, RelationSymbol
from .seeding import rng_from
from .stats import CylindricalDistribution, Gaussian2D, VonMises

TABLE_TOP_Z = 0.0

_OBJECTS = [
    ("cup", (0.08, 0.08, 0.09)),
    ("mug", (0.09, 0.09, 0.10)),
    ("plate", (0.16, 0.16, 0.03)),
    ("bowl", (0.13, 0.13, 0.06)),
    ("bottle", (0.07, 0.07, 0.20)),
    ("tea", (0.07, 0.12, 0.14)),
    ("milk", (0.07, 0.07, 0.18)),
    ("juice", (0.08, 0.08, 0.16)),
    ("fork", (0.04, 0.16, 0.03)),
    ("spoon", (0.04, 0.15, 0.03)),
    ("knife", (0.04, 0.18, 0.03)),
    ("sponge", (0.09, 0.06, 0.04)),
    ("salt", (0.06, 0.06, 0.11)),
    ("pepper", (0.06, 0.06, 0.12)),
]

_RELATIONS = [
    ("right_of", "right", ["right of", "to the right of", "on the right side of"]),
    ("left_of", "left", ["left of", "to the left of", "on the left side of"]),
    ("behind", "behind", ["behind"]),
    ("in_front_of", "in front", ["in front of"]),
    ("on_top_of", "on top", ["on top of"]),
    ("close_to", "close", ["close to", "next to", "near"]),
    ("far_from", "far", ["far from", "far away from"]),
    ("between", "between", ["between"]),
    ("among", "among", ["among", "amongst"]),
    ("closer", "closer", ["closer to"]),
    ("farther_from", "farther", ["farther from", "further from"]),
    ("other_side_of", "other side", ["on the other side of", "on the opposite side of"]),
]

# Ground-truth parameters in normalized cylindrical units:
# (mu_r, sigma_r, mu_phi, kappa, mu_h, sigma_h). Radii sit above the typical
# collision clearance (reference half width + rotated margin-inflated target
# footprint), so rejection sampling accepts at a healthy rate.
_GROUND_TRUTH = {
    "right_of": (2.8, 0.55, 0.0, 30.0, 0.45, 0.30),
    "left_of": (2.8, 0.55, math.pi, 30.0, 0.45, 0.30),
    "behind": (2.8, 0.55, math.pi / 2, 30.0, 0.45, 0.30),
    "in_front_of": (2.8, 0.55, -math.pi / 2, 30.0, 0.45, 0.30),
    "on_top_of": (0.12, 0.08, 0.0, 0.1, 1.60, 0.60),
    "close_to": (2.4, 0.40, 0.0, 0.2, 0.50, 0.35),
    "far_from": (5.0, 0.90, 0.0, 0.1, 0.50, 0.35),
    "between": (0.15, 0.10, 0.0, 0.1, 0.35, 0.25),
    "among": (0.45, 0.25, 0.0, 0.1, 0.40, 0.30),
    "closer": (2.6, 0.50, 0.0, 0.1, 0.50, 0.35),
    "farther_from": (4.2, 0.80, 0.0, 0.1, 0.50, 0.35),
    "other_side_of": (2.9, 0.55, 0.0, 0.1, 0.50, 0.35),
}


def default_object_catalog() -> ObjectCatalog:
    return ObjectCatalog(ObjectModel(name, name, extents) for name, extents in _OBJECTS)


def default_relation_symbols() -> list[RelationSymbol]:
    return [RelationSymbol(rid, display) for rid, display, _ in _RELATIONS]


def default_grounding_catalog() -> GroundingCatalog:
    objects = {name: [name] for name, _ in _OBJECTS}
    relations = {rid: surfaces for rid, _, surfaces in _RELATIONS}
    symbols = {rid: RelationSymbol(rid, display) for rid, display, _ in _RELATIONS}
    return GroundingCatalog(objects, relations, symbols)


def default_workspace() -> Workspace:
    table = AABB((-0.6, -0.4, -0.05), (0.6, 0.4, TABLE_TOP_Z))
    bounds = AABB((-0.6, -0.4, -0.05), (0.6, 0.4, 0.6))
    return Workspace([table], bounds)


def ground_truth_distribution(relation_id: str) -> CylindricalDistribution:
    mu_r, s_r, mu_phi, kappa, mu_h, s_h = _GROUND_TRUTH[relation_id]
    return CylindricalDistribution(
        Gaussian2D(np.array([mu_r, mu_h]), np.array([[s_r**2, 0.0], [0.0, s_h**2]])),
        VonMises(mu_phi, kappa),
    )


def reference_count(relation_id: str, rng: np.random.Generator) -> int:
    if relation_id == "between":
        return 2
    if relation_id == "among":
        return int(rng.integers(2, 4))
    return 1


_PLACEMENT_CONFIG = PlanConfig(
    candidate_count=1, collision_margin=0.01, rotation_checks=1, support_snap=0.02
)


def _resting_pose(model: ObjectModel, x: float, y: float, yaw: float) -> Pose:
    return Pose.from_yaw((x, y, TABLE_TOP_Z + model.extents[2] * 0.5), yaw)


def _place_free(
    catalog: ObjectCatalog,
    instances: dict[str, Pose],
    oid: str,
    workspace: Workspace,
    rng: np.random.Generator,
    region: tuple[float, float] = (0.55, 0.35),
    attempts: int = 200,
) -> Pose:
    """Drop an object at a random collision-free resting spot."""
    model = catalog.get(oid)
    for _ in range(attempts):
        x = rng.uniform(-region[0], region[0])
        y = rng.uniform(-region[1], region[1])
        yaw = rng.uniform(-math.pi, math.pi)
        pose = _resting_pose(model, x, y, yaw)
        probe = Scene(0.0, {**instances, oid: pose})
        checker = FeasibilityChecker(catalog, probe, oid, workspace, _PLACEMENT_CONFIG)
        if checker.check(pose.position).passed:
            return pose
    raise InfeasibleGeneration(f"could not place {oid!r} in a free spot")


def _pick_objects(
    catalog: ObjectCatalog, relation_id: str, clutter: int, rng: np.random.Generator
) -> tuple[str, list[str], list[str]]:
    n_refs = reference_count(relation_id, rng)
    ids = list(catalog.ids())
    chosen = rng.choice(len(ids), size=1 + n_refs + clutter, replace=False)
    names = [ids[i] for i in chosen]
    return names[0], names[1 : 1 + n_refs], names[1 + n_refs :]


def _build_initial_scene(
    catalog: ObjectCatalog,
    target: str,
    references: list[str],
    distractors: list[str],
    workspace: Workspace,
    rng: np.random.Generator,
    timestamp: float,
) -> Scene:
    instances: dict[str, Pose] = {}
    if len(references) == 1:
        instances[references[0]] = _place_free(
            catalog, instances, references[0], workspace, rng, region=(0.30, 0.20)
        )
    else:
        # spread the references around a central point so "between"/"among"
        # leave usable space in the middle
        cx = rng.uniform(-0.15, 0.15)
        cy = rng.uniform(-0.10, 0.10)
        base = rng.uniform(-math.pi, math.pi)
        radius = rng.uniform(0.20, 0.28)
        for i, ref in enumerate(references):
            angle = base + i * 2.0 * math.pi / len(references)
            model = catalog.get(ref)
            pose = _resting_pose(
                model,
                cx + radius * math.cos(angle),
                cy + radius * math.sin(angle),
                rng.uniform(-math.pi, math.pi),
            )
            instances[ref] = pose
    instances[target] = _place_free(catalog, instances, target, workspace, rng)
    for oid in distractors:
        instances[oid] = _place_free(catalog, instances, oid, workspace, rng)
    return Scene(timestamp, instances)


def demo_scene() -> Scene:
    """A small default scene for the interactive teaching service."""
    catalog = default_object_catalog()

    def rest(oid, x, y, yaw=0.0):
        return oid, _resting_pose(catalog.get(oid), x, y, yaw)

    return Scene(
        0.0,
        dict(
            [
                rest("cup", -0.15, 0.10),
                rest("mug", 0.25, 0.25),
                rest("plate", 0.20, 0.05),
                rest("tea", -0.35, -0.15),
                rest("milk", 0.05, -0.22),
                rest("bowl", 0.40, -0.20),
                rest("spoon", -0.05, 0.28, yaw=0.5),
            ]
        ),
    )


def _drop(checker: FeasibilityChecker, x: float, y: float):
    """Resting position over (x, y): the highest supporting surface wins."""
    best = None
    for rect, top in checker.surfaces:
        if rect.contains(x, y) and (best is None or top > best):
            best = top
    if best is None:
        return None
    return (x, y, best + checker.target_half_z)


def generate_synthetic_demos(
    relation: RelationSymbol,
    ground_truth: CylindricalDistribution,
    catalog: ObjectCatalog,
    workspace: Workspace,
    config: PlanConfig,
    count: int,
    clutter: int,
    seed: int,
) -> list[Demonstration]:
    """Generate `count` demonstrations of one relation at a clutter level.

    Every after-position is drawn from the ground truth and re-sampled until
    it passes the full feasibility check, so generated demonstrations are
    reproducible placements by construction.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    demos: list[Demonstration] = []
    for index in range(count):
        rng = rng_from("demo", relation.id, seed, index)
        scene_before = None
        placed = None
        attempts = 0
        # a scene can be structurally unworkable (e.g. the reference sits at
        # the table edge in the relation's direction); like a human teacher,
        # rebuild the scene when the placement budget for it runs out
        while placed is None and attempts < 1000:
            target, references, distractors = _pick_objects(catalog, relation.id, clutter, rng)
            scene_before = _build_initial_scene(
                catalog, target, references, distractors, workspace, rng, float(index)
            )
            frame = build_relation_frame(catalog, scene_before, references)
            checker = FeasibilityChecker(catalog, scene_before, target, workspace, config)
            for _ in range(50):
                attempts += 1
                c = ground_truth.sample(rng)
                raw = from_cylindrical(frame, c)
                # the teacher rests the object: drop it onto the highest
                # surface under the sampled (x, y); radius and azimuth carry
                # the relation, the height follows from the resting geometry
                dropped = _drop(checker, raw[0], raw[1])
                if dropped is None:
                    continue
                verdict = checker.check(dropped)
                if verdict.passed:
                    placed = verdict.position
                    break
        if placed is None:
            raise InfeasibleGeneration(
                f"no feasible sample for {relation.id!r} demo {index} after {attempts} attempts"
            )
        command = RelationCommand(relation, target, frozenset(references))
        target_yaw = scene_before.pose(target).yaw
        scene_after = scene_before.with_pose(
            target, Pose.from_yaw(placed, target_yaw), timestamp=float(index) + 0.5
        )
        demos.append(Demonstration(scene_before, command, scene_after))
    return demos
