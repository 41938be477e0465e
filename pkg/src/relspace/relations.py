"""Per-relation generative models built from demonstrations.

A demonstration is converted to normalized cylindrical coordinates of the
target's final position in the frame of the reference objects. The first
sample of a relation is augmented with two noise-perturbed copies so a
nondegenerate distribution exists from a single demonstration; afterwards
each new demonstration feeds the accumulators with exactly one sample.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySampleSet, RelationMismatch
from .geometry import (
    CylCoords,
    ObjectCatalog,
    Scene,
    build_relation_frame,
    to_cylindrical,
    wrap_angle,
)
from .seeding import rng_from
from .stats import (
    CylindricalDistribution,
    GaussianAccumulator,
    VonMisesAccumulator,
    distribution_from_dict,
    distribution_to_dict,
    finalize,
    mle_gaussian,
    mle_vonmises,
)

AUGMENT_COPIES = 2
AUGMENT_SIGMA = 1e-3


@dataclass(frozen=True)
class RelationSymbol:
    id: str
    display_name: str


@dataclass(frozen=True)
class RelationCommand:
    """A grounded task: put `target` in relation `relation` to `references`."""

    relation: RelationSymbol
    target: str
    references: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "references", frozenset(self.references))
        if not self.references:
            raise ValueError("reference set must be non-empty")
        if self.target in self.references:
            raise ValueError("target cannot be one of its references")

    def reference_list(self) -> list[str]:
        return sorted(self.references)


@dataclass(frozen=True)
class Demonstration:
    scene_before: Scene
    command: RelationCommand
    scene_after: Scene

    def __post_init__(self):
        for scene, label in ((self.scene_before, "before"), (self.scene_after, "after")):
            for oid in (self.command.target, *self.command.references):
                if oid not in scene.instances:
                    raise ValueError(f"object {oid!r} missing from scene_{label}")
        if not self.scene_after.timestamp > self.scene_before.timestamp:
            raise ValueError("scene_after must be later than scene_before")


class RelationModel:
    """Incremental accumulators plus the current distribution for one relation.

    `demo_count` counts real demonstrations; the accumulators additionally
    hold the two augmentation copies of the first sample, so their n is
    demo_count + 2 once at least one demonstration has been seen.
    """

    def __init__(self, relation: RelationSymbol):
        self.relation = relation
        self.gaussian_acc = GaussianAccumulator()
        self.vonmises_acc = VonMisesAccumulator()
        self.theta: CylindricalDistribution | None = None
        self.demo_count = 0


def demonstration_to_cyl(catalog: ObjectCatalog, demo: Demonstration) -> CylCoords:
    """Cylindrical coordinates of the demonstrated target position.

    The frame comes from the reference objects in the scene *before* the
    demonstration; the coordinates locate the target in the scene after.
    """
    frame = build_relation_frame(catalog, demo.scene_before, demo.command.references)
    return to_cylindrical(frame, demo.scene_after.pose(demo.command.target).position)


def augmentation_rng(relation_id: str, demo_index: int) -> np.random.Generator:
    """Noise stream for the first-sample augmentation, keyed by relation and
    demo index so batch and incremental replays agree bit-for-bit."""
    return rng_from("augment", relation_id, demo_index)


def augment_first_sample(c: CylCoords, rng: np.random.Generator) -> list[CylCoords]:
    """Return [c, c+eps1, c+eps2] with i.i.d. N(0, 1e-3) noise per component.

    The radius of perturbed copies is clamped at zero and the azimuth is
    wrapped back into [-pi, pi].
    """
    out = [c]
    for _ in range(AUGMENT_COPIES):
        eps = rng.normal(0.0, AUGMENT_SIGMA, size=3)
        out.append(
            CylCoords(max(c.r + eps[0], 0.0), wrap_angle(c.phi + eps[1]), c.h + eps[2])
        )
    return out


def _feed(model: RelationModel, c: CylCoords) -> None:
    model.gaussian_acc.add((c.r, c.h))
    model.vonmises_acc.add(c.phi)


def update_incremental(
    catalog: ObjectCatalog,
    model: RelationModel,
    demo: Demonstration,
    rng: np.random.Generator | None = None,
) -> RelationModel:
    """Fold one demonstration into the model using only current state.

    The first demonstration ever feeds its three augmented samples into the
    accumulators; later ones feed a single sample. The model's distribution
    is refreshed from the accumulators.
    """
    if demo.command.relation.id != model.relation.id:
        raise RelationMismatch(
            f"demo is for {demo.command.relation.id!r}, model is {model.relation.id!r}"
        )
    c = demonstration_to_cyl(catalog, demo)
    if model.demo_count == 0:
        if rng is None:
            rng = augmentation_rng(model.relation.id, 0)
        for sample in augment_first_sample(c, rng):
            _feed(model, sample)
    else:
        _feed(model, c)
    model.demo_count += 1
    model.theta = finalize(model.gaussian_acc, model.vonmises_acc)
    return model


def update_batch(catalog: ObjectCatalog, demos: list[Demonstration]) -> RelationModel:
    """Re-estimate a model from scratch via batch MLE over all demonstrations.

    Applies the same first-sample augmentation (same noise stream) as the
    incremental path, so both routes yield the same parameters.
    """
    if not demos:
        raise EmptySampleSet("batch update needs at least one demonstration")
    relation = demos[0].command.relation
    for d in demos[1:]:
        if d.command.relation.id != relation.id:
            raise RelationMismatch("demonstrations mix relations")
    coords = [demonstration_to_cyl(catalog, d) for d in demos]
    samples = augment_first_sample(coords[0], augmentation_rng(relation.id, 0)) + coords[1:]

    model = RelationModel(relation)
    for c in samples:
        _feed(model, c)
    model.demo_count = len(demos)
    model.theta = CylindricalDistribution(
        mle_gaussian([(c.r, c.h) for c in samples]),
        mle_vonmises([c.phi for c in samples]),
    )
    return model


# -- persistence record -------------------------------------------------------

def model_to_dict(model: RelationModel) -> dict:
    return {
        "relation_id": model.relation.id,
        "demo_count": model.demo_count,
        "accumulators": {
            "gaussian": model.gaussian_acc.state(),
            "vonmises": model.vonmises_acc.state(),
        },
        "theta": None if model.theta is None else distribution_to_dict(model.theta),
    }


def model_from_dict(d: dict, relation: RelationSymbol) -> RelationModel:
    if d["relation_id"] != relation.id:
        raise RelationMismatch("record does not match relation")
    model = RelationModel(relation)
    model.demo_count = int(d["demo_count"])
    model.gaussian_acc = GaussianAccumulator.from_state(d["accumulators"]["gaussian"])
    model.vonmises_acc = VonMisesAccumulator.from_state(d["accumulators"]["vonmises"])
    model.theta = None if d["theta"] is None else distribution_from_dict(d["theta"])
    return model


def command_to_dict(command: RelationCommand) -> dict:
    return {
        "relation": command.relation.id,
        "target": command.target,
        "references": command.reference_list(),
    }


def command_from_dict(d: dict, symbols: dict[str, RelationSymbol]) -> RelationCommand:
    return RelationCommand(symbols[d["relation"]], d["target"], frozenset(d["references"]))


def demo_to_dict(demo: Demonstration) -> dict:
    from .geometry import scene_to_dict

    return {
        "scene_before": scene_to_dict(demo.scene_before),
        "command": command_to_dict(demo.command),
        "scene_after": scene_to_dict(demo.scene_after),
    }


def demo_from_dict(d: dict, symbols: dict[str, RelationSymbol]) -> Demonstration:
    from .geometry import scene_from_dict

    return Demonstration(
        scene_from_dict(d["scene_before"]),
        command_from_dict(d["command"], symbols),
        scene_from_dict(d["scene_after"]),
    )
