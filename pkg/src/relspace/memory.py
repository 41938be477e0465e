"""Long-term memory: sample archive, relation knowledge, command history.

Three segments mirror the robot memory layout: the sample segment keeps every
demonstration ever stored (append-only, per relation), the relation segment
holds prior knowledge (symbols) plus the current learned model per relation,
and the command segment records grounded commands in arrival order.

Incremental updates deliberately bypass the sample segment: the updater in
:mod:`relspace.relations` receives only the current model and the new
demonstration. Samples are still archived for batch retraining.

Persistence is plain JSON/JSONL under a root directory; snapshots add a
sha256 manifest so truncated or edited files are rejected on restore.
"""
from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path

from .errors import CorruptSnapshot, StorageFailure
from .relations import (
    Demonstration,
    RelationCommand,
    RelationModel,
    RelationSymbol,
    command_from_dict,
    command_to_dict,
    demo_from_dict,
    demo_to_dict,
    model_from_dict,
    model_to_dict,
)

SAMPLES_DIR = "samples"
RELATIONS_FILE = "relations.json"
COMMANDS_FILE = "commands.jsonl"
MANIFEST_FILE = "manifest.json"


class SampleSegment:
    """Append-only per-relation demonstration archive."""

    def __init__(self, root: Path | None):
        self._root = root
        self._demos: dict[str, list[tuple[float, Demonstration]]] = {}

    def store(self, demo: Demonstration, timestamp: float) -> None:
        rid = demo.command.relation.id
        self._demos.setdefault(rid, []).append((timestamp, demo))
        if self._root is not None:
            path = self._root / SAMPLES_DIR / f"{rid}.jsonl"
            record = {"timestamp": timestamp, **demo_to_dict(demo)}
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                with path.open("a", encoding="utf-8") as f:
                    f.write(json.dumps(record) + "\n")
            except OSError as exc:
                raise StorageFailure(f"cannot append sample: {exc}") from exc

    def query(self, relation: RelationSymbol) -> list[Demonstration]:
        return [demo for _, demo in self._demos.get(relation.id, [])]

    def counts(self) -> dict[str, int]:
        return {rid: len(items) for rid, items in self._demos.items()}


class RelationSegment:
    """Prior knowledge (symbols) plus the learned model per relation."""

    def __init__(self, symbols: list[RelationSymbol], root: Path | None):
        self._root = root
        self._symbols = {s.id: s for s in symbols}
        self._models: dict[str, RelationModel] = {}

    def symbols(self) -> list[RelationSymbol]:
        return list(self._symbols.values())

    def symbol(self, relation_id: str) -> RelationSymbol:
        return self._symbols[relation_id]

    def get_model(self, relation_id: str) -> RelationModel | None:
        return self._models.get(relation_id)

    def put_model(self, model: RelationModel) -> None:
        self._models[model.relation.id] = model
        if self._root is not None:
            self._persist()

    def _payload(self) -> dict:
        return {
            "relations": [
                {
                    "id": s.id,
                    "display_name": s.display_name,
                    "model": None if s.id not in self._models else model_to_dict(self._models[s.id]),
                }
                for s in self._symbols.values()
            ]
        }

    def _persist(self) -> None:
        try:
            path = self._root / RELATIONS_FILE
            path.write_text(json.dumps(self._payload()), encoding="utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot write relation segment: {exc}") from exc


class CommandSegment:
    """Append-only history of grounded commands; the latest is the current task."""

    def __init__(self, root: Path | None):
        self._root = root
        self._commands: list[tuple[float, RelationCommand]] = []

    def append(self, timestamp: float, command: RelationCommand) -> None:
        self._commands.append((timestamp, command))
        if self._root is not None:
            try:
                path = self._root / COMMANDS_FILE
                with path.open("a", encoding="utf-8") as f:
                    f.write(json.dumps({"timestamp": timestamp, **command_to_dict(command)}) + "\n")
            except OSError as exc:
                raise StorageFailure(f"cannot append command: {exc}") from exc

    def latest(self) -> tuple[float, RelationCommand] | None:
        return self._commands[-1] if self._commands else None

    def latest_for(self, relation_id: str) -> tuple[float, RelationCommand] | None:
        for ts, cmd in reversed(self._commands):
            if cmd.relation.id == relation_id:
                return ts, cmd
        return None

    def all(self) -> list[tuple[float, RelationCommand]]:
        return list(self._commands)


class LongTermMemory:
    """The three segments behind one facade.

    With ``root=None`` the memory lives purely in process (used by the
    simulation harness); with a directory every mutation is persisted before
    returning. Snapshots work in both modes.
    """

    def __init__(self, symbols: list[RelationSymbol], root: str | Path | None = None):
        self._root = Path(root) if root is not None else None
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)
        self.samples = SampleSegment(self._root)
        self.relations = RelationSegment(symbols, self._root)
        self.commands = CommandSegment(self._root)

    def store_sample(self, demo: Demonstration, timestamp: float) -> None:
        self.samples.store(demo, timestamp)

    def query_samples(self, relation: RelationSymbol) -> list[Demonstration]:
        return self.samples.query(relation)

    # -- snapshot / restore ---------------------------------------------------

    def snapshot(self, path: str | Path) -> None:
        """Write a checksummed full dump of all three segments."""
        root = Path(path)
        if root.exists():
            shutil.rmtree(root)
        (root / SAMPLES_DIR).mkdir(parents=True)
        files: dict[str, str] = {}

        def write(rel: str, text: str) -> None:
            (root / rel).write_text(text, encoding="utf-8")
            files[rel] = hashlib.sha256(text.encode("utf-8")).hexdigest()

        for rid, items in self.samples._demos.items():
            lines = [json.dumps({"timestamp": ts, **demo_to_dict(d)}) for ts, d in items]
            write(f"{SAMPLES_DIR}/{rid}.jsonl", "".join(line + "\n" for line in lines))
        write(RELATIONS_FILE, json.dumps(self.relations._payload()))
        write(
            COMMANDS_FILE,
            "".join(
                json.dumps({"timestamp": ts, **command_to_dict(c)}) + "\n"
                for ts, c in self.commands.all()
            ),
        )
        (root / MANIFEST_FILE).write_text(json.dumps({"files": files}), encoding="utf-8")

    @classmethod
    def restore(cls, path: str | Path, root: str | Path | None = None) -> "LongTermMemory":
        """Rebuild a memory from a snapshot, verifying every checksum."""
        snap = Path(path)
        manifest_path = snap / MANIFEST_FILE
        if not manifest_path.is_file():
            raise CorruptSnapshot(f"missing manifest in {snap}")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CorruptSnapshot(f"unreadable manifest: {exc}") from exc

        contents: dict[str, str] = {}
        for rel, digest in manifest.get("files", {}).items():
            fpath = snap / rel
            if not fpath.is_file():
                raise CorruptSnapshot(f"missing file {rel}")
            text = fpath.read_text(encoding="utf-8")
            if hashlib.sha256(text.encode("utf-8")).hexdigest() != digest:
                raise CorruptSnapshot(f"checksum mismatch for {rel}")
            contents[rel] = text

        if RELATIONS_FILE not in contents:
            raise CorruptSnapshot("snapshot lacks the relation segment")
        try:
            rel_payload = json.loads(contents[RELATIONS_FILE])
            symbols = [
                RelationSymbol(rec["id"], rec["display_name"])
                for rec in rel_payload["relations"]
            ]
            mem = cls(symbols, root)
            sym_map = {s.id: s for s in symbols}
            for rec in rel_payload["relations"]:
                if rec["model"] is not None:
                    mem.relations.put_model(model_from_dict(rec["model"], sym_map[rec["id"]]))
            for rel, text in contents.items():
                if rel.startswith(SAMPLES_DIR + "/"):
                    for line in text.splitlines():
                        rec = json.loads(line)
                        demo = demo_from_dict(rec, sym_map)
                        mem.samples.store(demo, float(rec["timestamp"]))
            if COMMANDS_FILE in contents:
                for line in contents[COMMANDS_FILE].splitlines():
                    rec = json.loads(line)
                    mem.commands.append(float(rec["timestamp"]), command_from_dict(rec, sym_map))
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptSnapshot(f"malformed snapshot payload: {exc}") from exc
        return mem
