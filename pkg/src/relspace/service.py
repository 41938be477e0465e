"""HTTP facade over one live teaching session.

The session mirrors the interaction loop: a command is grounded and planned;
a successful plan is executed by moving the object in the simulated scene,
a failed one stores the command and asks the human for a demonstration. The
human manipulates the scene via pose updates and signals completion with the
cue endpoint, which assembles a demonstration from the scene as it was when
the command arrived and the scene now, and updates the model incrementally.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import GroundingError, NoCommandContext, UnknownObject
from .geometry import (
    ObjectCatalog,
    Pose,
    Scene,
    build_relation_frame,
    scene_to_dict,
    to_cylindrical,
)
from .grounding import GroundingCatalog, ground, verbalize_query
from .memory import LongTermMemory
from .planner import PlanConfig, PlanStatus, Workspace, plan
from .relations import Demonstration, RelationCommand, RelationModel, update_incremental
from .seeding import rng_from


@dataclass
class _CommandContext:
    command: RelationCommand
    scene_at_command: Scene


class Session:
    """One interactive teaching session; all mutations serialized by a lock."""

    def __init__(
        self,
        catalog: ObjectCatalog,
        grounding: GroundingCatalog,
        workspace: Workspace,
        scene: Scene,
        config: PlanConfig,
    ):
        self.catalog = catalog
        self.grounding = grounding
        self.workspace = workspace
        self.config = config
        self._initial_scene = scene
        self._lock = threading.Lock()
        self._plan_counter = 0
        self._reset_locked()

    def _reset_locked(self) -> None:
        self.scene = self._initial_scene
        self.memory = LongTermMemory(list(self.grounding.symbols.values()))
        self.pending: _CommandContext | None = None
        self.last_context: _CommandContext | None = None
        self.last_result = None
        self.events: list[dict] = []
        self._clock = 0.0

    def _tick(self) -> float:
        self._clock += 1.0
        return self._clock

    def _log(self, source: str, text: str) -> None:
        self.events.append({"source": source, "text": text})

    # -- steps ---------------------------------------------------------------

    def command(self, text: str) -> dict:
        with self._lock:
            cmd = ground(text, self.grounding, self.scene)
            now = self._tick()
            self._log("human", text)
            self.memory.commands.append(now, cmd)
            context = _CommandContext(cmd, self.scene)
            self.last_context = context

            model = self.memory.relations.get_model(cmd.relation.id)
            self._plan_counter += 1
            rng = rng_from("service-plan", self.config.seed, self._plan_counter)
            result = plan(self.catalog, self.scene, cmd, model, self.workspace, self.config, rng)
            self.last_result = result

            if result.status is PlanStatus.SUCCESS:
                target_yaw = self.scene.pose(cmd.target).yaw
                self.scene = self.scene.with_pose(
                    cmd.target, Pose.from_yaw(result.chosen, target_yaw), timestamp=now
                )
                self.pending = None
                utterance = f"Placing the {self.catalog.get(cmd.target).name}."
                self._log("robot", utterance)
                return {
                    "status": "executed",
                    "utterance": utterance,
                    "relation": cmd.relation.id,
                    "target": cmd.target,
                    "references": cmd.reference_list(),
                    "position": list(result.chosen),
                }
            kind = "no_model" if result.status is PlanStatus.NO_MODEL else "insufficient_model"
            self.pending = context
            utterance = verbalize_query(kind, cmd.relation)
            self._log("robot", utterance)
            return {
                "status": "query",
                "utterance": utterance,
                "relation": cmd.relation.id,
                "target": cmd.target,
                "references": cmd.reference_list(),
                "reason": result.status.value,
            }

    def move_object(self, object_id: str, position, orientation=None) -> dict:
        with self._lock:
            current = self.scene.pose(object_id)
            pose = Pose(tuple(position), tuple(orientation) if orientation else current.orientation)
            self.scene = self.scene.with_pose(object_id, pose, timestamp=self._tick())
            return {"ok": True}

    def cue(self) -> dict:
        with self._lock:
            context = self.pending or self.last_context
            if context is None:
                raise NoCommandContext("no command was given before the cue")
            now = self._tick()
            demo = Demonstration(
                Scene(now - 0.5, dict(context.scene_at_command.instances)),
                context.command,
                Scene(now, dict(self.scene.instances)),
            )
            self.memory.store_sample(demo, now)
            rid = context.command.relation.id
            model = self.memory.relations.get_model(rid)
            if model is None:
                model = RelationModel(self.memory.relations.symbol(rid))
            update_incremental(self.catalog, model, demo)
            self.memory.relations.put_model(model)
            self.pending = None
            utterance = verbalize_query("thanks", context.command.relation)
            self._log("robot", utterance)
            return {
                "utterance": utterance,
                "relation": rid,
                "demo_count": model.demo_count,
            }

    def heatmap(self, relation_id: str, width: int, height: int) -> dict | None:
        with self._lock:
            model = self.memory.relations.get_model(relation_id)
            if model is None or model.theta is None:
                return None
            latest = self.memory.commands.latest_for(relation_id)
            if latest is None:
                return None
            references = latest[1].references
            frame = build_relation_frame(self.catalog, self.scene, references)
            theta = model.theta
            mu_r = float(theta.rh.mean[0])
            sigma_r = float(np.sqrt(theta.rh.covariance[0, 0]))
            half = frame.horizontal_scale * max(2.5, mu_r + 3 * sigma_r)
            xs = np.linspace(frame.origin[0] - half, frame.origin[0] + half, width)
            ys = np.linspace(frame.origin[1] - half, frame.origin[1] + half, height)
            h_world = frame.origin[2] + float(theta.rh.mean[1]) * frame.vertical_scale
            values = []
            for y in ys:
                for x in xs:
                    c = to_cylindrical(frame, (float(x), float(y), h_world))
                    values.append(float(theta.pdf(c)))
            return {
                "relation": relation_id,
                "width": width,
                "height": height,
                "x_min": float(xs[0]),
                "x_max": float(xs[-1]),
                "y_min": float(ys[0]),
                "y_max": float(ys[-1]),
                "h_world": h_world,
                "values": values,
            }

    def state(self) -> dict:
        with self._lock:
            counts = {s.id: 0 for s in self.memory.relations.symbols()}
            for rid, n in self.memory.samples.counts().items():
                counts[rid] = n
            result = self.last_result
            return {
                "scene": scene_to_dict(self.scene),
                "objects": [
                    {
                        "id": m.id,
                        "name": m.name,
                        "extents_m": list(m.extents),
                    }
                    for m in self.catalog
                ],
                "workspace": {
                    "bounds": [list(self.workspace.bounds.min), list(self.workspace.bounds.max)],
                    "tables": [[list(t.min), list(t.max)] for t in self.workspace.tables],
                },
                "events": list(self.events),
                "demo_counts": counts,
                "pending": self.pending is not None,
                "pending_relation": self.pending.command.relation.id if self.pending else None,
                "cue_available": (self.pending or self.last_context) is not None,
                "last_command": (
                    None
                    if self.last_context is None
                    else {
                        "relation": self.last_context.command.relation.id,
                        "target": self.last_context.command.target,
                        "references": self.last_context.command.reference_list(),
                    }
                ),
                "last_plan": (
                    None
                    if result is None
                    else {
                        "status": result.status.value,
                        "chosen": None if result.chosen is None else list(result.chosen),
                    }
                ),
            }

    def reset(self) -> dict:
        with self._lock:
            self._reset_locked()
            return {"ok": True}


class CommandBody(BaseModel):
    text: str


class SceneBody(BaseModel):
    id: str
    position_m: list[float]
    orientation_wxyz: list[float] | None = None


def create_app(session: Session) -> FastAPI:
    app = FastAPI(title="relspace teaching service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/command")
    def post_command(body: CommandBody):
        try:
            return session.command(body.text)
        except GroundingError as exc:
            return JSONResponse(
                status_code=400, content={"error": type(exc).__name__, "detail": str(exc)}
            )

    @app.post("/scene")
    def post_scene(body: SceneBody):
        try:
            return session.move_object(body.id, body.position_m, body.orientation_wxyz)
        except UnknownObject as exc:
            return JSONResponse(
                status_code=404, content={"error": "UnknownObject", "detail": str(exc)}
            )

    @app.post("/cue")
    def post_cue():
        try:
            return session.cue()
        except NoCommandContext as exc:
            return JSONResponse(
                status_code=409, content={"error": "NoCommandContext", "detail": str(exc)}
            )

    @app.get("/model/{relation_id}/heatmap")
    def get_heatmap(relation_id: str, grid: str = "64x64"):
        try:
            w, h = (int(v) for v in grid.lower().split("x"))
        except ValueError:
            return JSONResponse(status_code=400, content={"error": "BadGrid", "detail": grid})
        if not (1 <= w <= 512 and 1 <= h <= 512):
            return JSONResponse(status_code=400, content={"error": "BadGrid", "detail": grid})
        result = session.heatmap(relation_id, w, h)
        if result is None:
            return JSONResponse(
                status_code=404, content={"error": "NoModel", "detail": relation_id}
            )
        return result

    @app.get("/state")
    def get_state():
        return session.state()

    @app.post("/reset")
    def post_reset():
        return session.reset()

    return app
