"""Fixed-offset baseline placement rules for the twelve relations.

Each rule is a closed-form function of the reference positions, the target's
initial position, and the world axes. Baselines produce exactly one candidate
(no sampling), so they fail outright when that point is infeasible.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateDirection
from .geometry import ObjectCatalog, Scene, Vec3
from .planner import PlanConfig, PlanResult, PlanStatus, Candidate, Workspace, check_feasible
from .relations import RelationCommand

X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])
Z = np.array([0.0, 0.0, 1.0])


def _dir(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise DegenerateDirection("direction undefined: target coincides with reference")
    return v / norm


def _rules():
    return {
        "right_of": lambda u, v, refs: v + 0.20 * X,
        "left_of": lambda u, v, refs: v - 0.20 * X,
        "behind": lambda u, v, refs: v + 0.20 * Y,
        "in_front_of": lambda u, v, refs: v - 0.20 * Y,
        "on_top_of": lambda u, v, refs: v + 0.10 * Z,
        "close_to": lambda u, v, refs: v + 0.10 * _dir(u - v),
        "far_from": lambda u, v, refs: v + 0.50 * _dir(u - v),
        "between": lambda u, v, refs: refs.mean(axis=0),
        "among": lambda u, v, refs: refs.mean(axis=0) + 0.10 * _dir(u - refs.mean(axis=0)),
        "closer": lambda u, v, refs: v + 0.5 * (u - v),
        "farther_from": lambda u, v, refs: v + 2.0 * (u - v),
        "other_side_of": lambda u, v, refs: v - (u - v),
    }


BASELINE_RULES = _rules()
MULTI_REFERENCE_RELATIONS = {"between", "among"}


def baseline_place(scene: Scene, command: RelationCommand) -> Vec3:
    """The Table-style fixed-offset placement for a command.

    `v` is the reference position (the mean when several references are
    given); `u` is the target's initial position in the scene.
    """
    rule = BASELINE_RULES.get(command.relation.id)
    if rule is None:
        raise KeyError(f"no baseline rule for relation {command.relation.id!r}")
    refs = np.array([scene.pose(r).position for r in command.reference_list()], dtype=float)
    if command.relation.id in MULTI_REFERENCE_RELATIONS and refs.shape[0] < 2:
        raise ValueError(f"{command.relation.id} needs at least two references")
    u = np.asarray(scene.pose(command.target).position, dtype=float)
    v = refs.mean(axis=0)
    p = rule(u, v, refs)
    return (float(p[0]), float(p[1]), float(p[2]))


def baseline_plan(
    catalog: ObjectCatalog,
    scene: Scene,
    command: RelationCommand,
    workspace: Workspace,
    config: PlanConfig,
) -> PlanResult:
    """Run the single baseline candidate through the feasibility check.

    No sampling and no alternatives: an obstructed or off-table candidate
    means the baseline fails the task.
    """
    position = baseline_place(scene, command)
    verdict = check_feasible(catalog, scene, command.target, position, workspace, config)
    candidate = Candidate(verdict.position, math.nan, verdict)
    if verdict.passed:
        return PlanResult(PlanStatus.SUCCESS, verdict.position, [candidate])
    return PlanResult(PlanStatus.NO_FEASIBLE_CANDIDATE, None, [candidate])
