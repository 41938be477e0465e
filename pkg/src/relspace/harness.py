"""Scripted interaction loop and the learning-scenario evaluation protocol.

A learning scenario fixes one relation and ten demonstrations; each
demonstration implies a task (its initial scene plus the command). Per
repetition the tasks are shuffled, the robot starts with an empty memory and
performs one interaction per task: it plans, and only when planning fails is
the corresponding demonstration consumed to update the model incrementally.
After every interaction (and once before the first) the current model is
evaluated on all tasks, split into seen and unseen ones.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .baselines import baseline_plan
from .geometry import ObjectCatalog, Scene
from .memory import LongTermMemory
from .planner import PlanConfig, PlanResult, PlanStatus, Workspace, plan
from .relations import (
    Demonstration,
    RelationCommand,
    RelationModel,
    RelationSymbol,
    update_incremental,
)
from .grounding import GroundingCatalog
from .seeding import rng_from

Mode = Literal["learned", "baseline"]


@dataclass(frozen=True)
class Task:
    scene: Scene
    command: RelationCommand


@dataclass(frozen=True)
class LearningScenario:
    relation: RelationSymbol
    demonstrations: list[Demonstration]
    repetitions: int = 10
    seed: int = 0

    def __post_init__(self):
        for d in self.demonstrations:
            if d.command.relation.id != self.relation.id:
                raise ValueError("all demonstrations must share the scenario relation")

    def tasks(self) -> list[Task]:
        return [Task(d.scene_before, d.command) for d in self.demonstrations]


@dataclass(frozen=True)
class InteractionRecord:
    """One interaction plus the evaluation that followed it; index 0 is the
    pre-interaction evaluation (no plan, no demo)."""

    index: int
    plan_status: PlanStatus | None
    demo_given: bool
    seen_success: list[bool]
    unseen_success: list[bool]

    def __post_init__(self):
        if self.index == 0 and (self.plan_status is not None or self.demo_given):
            raise ValueError("the pre-interaction record carries no plan")


@dataclass(frozen=True)
class MetricsRow:
    relation: str
    repetition: int
    interaction: int
    seen_ratio: float  # NaN when there are no seen tasks yet
    unseen_ratio: float  # NaN when no unseen tasks remain
    all_ratio: float
    demos_received: int


@dataclass(frozen=True)
class SimContext:
    catalog: ObjectCatalog
    workspace: Workspace
    config: PlanConfig


def _plan_task(
    ctx: SimContext,
    mode: Mode,
    model: RelationModel | None,
    task: Task,
    rng: np.random.Generator,
) -> PlanResult:
    if mode == "baseline":
        return baseline_plan(ctx.catalog, task.scene, task.command, ctx.workspace, ctx.config)
    return plan(ctx.catalog, task.scene, task.command, model, ctx.workspace, ctx.config, rng)


def run_interaction(
    ctx: SimContext,
    memory: LongTermMemory,
    task: Task,
    demo: Demonstration,
    mode: Mode,
    rng: np.random.Generator,
    timestamp: float = 0.0,
) -> tuple[PlanStatus, bool]:
    """One command-plan-(execute | demonstrate+update) cycle.

    Returns the plan status and whether the demonstration was consumed. In
    baseline mode the memory is never touched.
    """
    if mode == "baseline":
        result = _plan_task(ctx, mode, None, task, rng)
        return result.status, False

    memory.commands.append(timestamp, task.command)
    rid = task.command.relation.id
    model = memory.relations.get_model(rid)
    result = _plan_task(ctx, mode, model, task, rng)
    if result.status is PlanStatus.SUCCESS:
        return result.status, False
    memory.store_sample(demo, timestamp)
    if model is None:
        model = RelationModel(memory.relations.symbol(rid))
    update_incremental(ctx.catalog, model, demo)
    memory.relations.put_model(model)
    return result.status, True


def evaluate_model(
    ctx: SimContext,
    mode: Mode,
    model: RelationModel | None,
    tasks: Sequence[Task],
    seed_key: tuple,
) -> list[bool]:
    """Success bit per task: can a feasible placement be generated?

    Evaluation is side-effect free; each task gets its own RNG substream
    derived from `seed_key` and the task index.
    """
    bits = []
    for i, task in enumerate(tasks):
        rng = rng_from("eval", *seed_key, i)
        result = _plan_task(ctx, mode, model, task, rng)
        bits.append(result.status is PlanStatus.SUCCESS)
    return bits


def _ratio(bits: Sequence[bool]) -> float:
    return float(np.mean(bits)) if len(bits) else math.nan


def run_learning_scenario(
    ctx: SimContext, scenario: LearningScenario, mode: Mode
) -> list[MetricsRow]:
    """All repetitions of one learning scenario; one row per evaluation."""
    rows: list[MetricsRow] = []
    n = len(scenario.demonstrations)
    for rep in range(scenario.repetitions):
        memory = LongTermMemory([scenario.relation])
        order = list(range(n))
        if mode == "learned":
            # constant baseline models are order-independent; shuffling is
            # only meaningful for the learned path
            rng_from("shuffle", scenario.seed, scenario.relation.id, rep).shuffle(order)
        demos = [scenario.demonstrations[i] for i in order]
        tasks = [Task(d.scene_before, d.command) for d in demos]

        demos_received = 0
        for k in range(n + 1):
            status = None
            given = False
            if k > 0:
                rng = rng_from("interact", scenario.seed, scenario.relation.id, rep, k)
                status, given = run_interaction(
                    ctx, memory, tasks[k - 1], demos[k - 1], mode, rng, timestamp=float(k)
                )
                demos_received += int(given)
            model = memory.relations.get_model(scenario.relation.id)
            bits = evaluate_model(
                ctx, mode, model, tasks, (scenario.seed, scenario.relation.id, rep, k)
            )
            record = InteractionRecord(
                index=k,
                plan_status=status,
                demo_given=given,
                seen_success=bits[:k],
                unseen_success=bits[k:],
            )
            rows.append(
                MetricsRow(
                    relation=scenario.relation.id,
                    repetition=rep,
                    interaction=record.index,
                    seen_ratio=_ratio(record.seen_success),
                    unseen_ratio=_ratio(record.unseen_success),
                    all_ratio=_ratio(bits),
                    demos_received=demos_received,
                )
            )
    return rows


def aggregate(rows: Sequence[MetricsRow]) -> dict[int, dict[str, tuple[float, float]]]:
    """Population mean and std per metric per interaction index.

    NaN cells (empty seen/unseen sets) are excluded from their metric's
    aggregation.
    """
    by_interaction: dict[int, dict[str, list[float]]] = {}
    for row in rows:
        cell = by_interaction.setdefault(
            row.interaction,
            {"seen_ratio": [], "unseen_ratio": [], "all_ratio": [], "demos_received": []},
        )
        for metric in ("seen_ratio", "unseen_ratio", "all_ratio", "demos_received"):
            value = float(getattr(row, metric))
            if not math.isnan(value):
                cell[metric].append(value)
    out: dict[int, dict[str, tuple[float, float]]] = {}
    for k, metrics in sorted(by_interaction.items()):
        out[k] = {
            name: ((float(np.mean(vals)), float(np.std(vals))) if vals else (math.nan, math.nan))
            for name, vals in metrics.items()
        }
    return out


# -- CSV ----------------------------------------------------------------------

CSV_COLUMNS = [
    "relation",
    "repetition",
    "interaction",
    "seen_ratio",
    "unseen_ratio",
    "all_ratio",
    "demos_received",
]


def rows_to_csv(rows: Sequence[MetricsRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.relation,
                r.repetition,
                r.interaction,
                repr(r.seen_ratio),
                repr(r.unseen_ratio),
                repr(r.all_ratio),
                r.demos_received,
            ]
        )
    return buf.getvalue()


def rows_from_csv(text: str) -> list[MetricsRow]:
    reader = csv.DictReader(io.StringIO(text))
    return [
        MetricsRow(
            relation=rec["relation"],
            repetition=int(rec["repetition"]),
            interaction=int(rec["interaction"]),
            seen_ratio=float(rec["seen_ratio"]),
            unseen_ratio=float(rec["unseen_ratio"]),
            all_ratio=float(rec["all_ratio"]),
            demos_received=int(rec["demos_received"]),
        )
        for rec in reader
    ]


# -- demonstration files (one JSON record per line) -----------------------------

def write_demos_jsonl(path, demos: Sequence[Demonstration]) -> None:
    from pathlib import Path

    from .relations import demo_to_dict

    lines = [json.dumps(demo_to_dict(d)) for d in demos]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_demos_jsonl(path, symbols: dict[str, RelationSymbol]) -> list[Demonstration]:
    from pathlib import Path

    from .relations import demo_from_dict

    text = Path(path).read_text(encoding="utf-8")
    return [demo_from_dict(json.loads(line), symbols) for line in text.splitlines() if line]


# -- command verbalization (sentence templates) --------------------------------

_VERBS = ["put", "place", "move"]


def verbalize_command(
    command: RelationCommand, catalog: GroundingCatalog, rng: np.random.Generator
) -> str:
    """Render a command as one of the template sentences the grounder accepts."""
    verb = _VERBS[int(rng.integers(len(_VERBS)))]
    surfaces = catalog.relations[command.relation.id]
    surface = surfaces[int(rng.integers(len(surfaces)))]

    def name(oid: str) -> str:
        names = catalog.objects[oid]
        return names[int(rng.integers(len(names)))]

    refs = command.reference_list()
    if len(refs) == 1:
        refs_text = f"the {name(refs[0])}"
    else:
        heads = ", ".join(f"the {name(r)}" for r in refs[:-1])
        refs_text = f"{heads} and the {name(refs[-1])}"
    return f"{verb} the {name(command.target)} {surface} {refs_text}"
