"""Deterministic language grounding via longest-substring template matching.

Commands like "put the tea to the right of the cup" are resolved against a
catalog of object and relation surface strings. Matching is case-insensitive,
whitespace-normalizing and word-bounded; when surface strings overlap, the
longest match wins. The first object mention becomes the target, the rest the
reference set.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import (
    AmbiguousMatch,
    InsufficientReferences,
    NoRelationMatch,
    NoTargetMatch,
    ObjectNotInScene,
)
from .geometry import Scene
from .relations import RelationCommand, RelationSymbol


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().lower())


def _check_surfaces(kind: str, surfaces: dict[str, list[str]]) -> None:
    for sid, names in surfaces.items():
        for name in names:
            if not name or name != _normalize(name):
                raise ValueError(f"{kind} surface {name!r} must be non-empty and normalized")
            for other_id, other_names in surfaces.items():
                if other_id == sid:
                    continue
                for other in other_names:
                    if name in other or other in name:
                        raise ValueError(
                            f"ambiguous {kind} surfaces: {name!r} ({sid}) vs {other!r} ({other_id})"
                        )


@dataclass(frozen=True)
class GroundingCatalog:
    """Surface strings for objects and relations, keyed by entity id."""

    objects: dict[str, list[str]]
    relations: dict[str, list[str]]
    symbols: dict[str, RelationSymbol]

    def __post_init__(self):
        _check_surfaces("object", self.objects)
        _check_surfaces("relation", self.relations)
        missing = set(self.relations) - set(self.symbols)
        if missing:
            raise ValueError(f"relations without symbols: {sorted(missing)}")


@dataclass(frozen=True)
class _Mention:
    entity_id: str
    start: int
    end: int


def _find_mentions(text: str, surfaces: dict[str, list[str]]) -> list[_Mention]:
    """All non-overlapping surface matches, longest-first, sorted by position."""
    raw: list[_Mention] = []
    for sid, names in surfaces.items():
        for name in names:
            for m in re.finditer(rf"\b{re.escape(name)}\b", text):
                raw.append(_Mention(sid, m.start(), m.end()))
    raw.sort(key=lambda m: (-(m.end - m.start), m.start))
    chosen: list[_Mention] = []
    for cand in raw:
        overlap = [c for c in chosen if cand.start < c.end and c.start < cand.end]
        if not overlap:
            chosen.append(cand)
            continue
        for c in overlap:
            same_len = (c.end - c.start) == (cand.end - cand.start)
            if same_len and c.entity_id != cand.entity_id:
                raise AmbiguousMatch(
                    f"{text[cand.start:cand.end]!r} matches both "
                    f"{c.entity_id!r} and {cand.entity_id!r}"
                )
        # shorter overlapping match loses to the already chosen longer one
    chosen.sort(key=lambda m: m.start)
    return chosen


def ground(command_text: str, catalog: GroundingCatalog, scene: Scene) -> RelationCommand:
    """Parse a command string into a relation command against the scene.

    Raises the specific grounding error when no relation phrase matches, no
    or too few objects are mentioned, matches are ambiguous, or a mentioned
    object is absent from the scene.
    """
    text = _normalize(command_text)
    if not text:
        raise NoTargetMatch("empty command")

    rel_mentions = _find_mentions(text, catalog.relations)
    rel_ids = {m.entity_id for m in rel_mentions}
    if not rel_ids:
        raise NoRelationMatch(f"no relation phrase in {command_text!r}")
    if len(rel_ids) > 1:
        raise AmbiguousMatch(f"multiple relation phrases in {command_text!r}: {sorted(rel_ids)}")
    relation = catalog.symbols[rel_ids.pop()]
    rel_spans = [(m.start, m.end) for m in rel_mentions]

    obj_mentions = [
        m
        for m in _find_mentions(text, catalog.objects)
        if not any(m.start < e and s < m.end for s, e in rel_spans)
    ]
    if not obj_mentions:
        raise NoTargetMatch(f"no object mention in {command_text!r}")
    target = obj_mentions[0].entity_id
    references: list[str] = []
    for m in obj_mentions[1:]:
        if m.entity_id != target and m.entity_id not in references:
            references.append(m.entity_id)
    if not references:
        raise InsufficientReferences(f"no reference object in {command_text!r}")

    for oid in (target, *references):
        if oid not in scene.instances:
            raise ObjectNotInScene(f"object {oid!r} not in the current scene")
    return RelationCommand(relation, target, frozenset(references))


_QUERY_TEMPLATES = {
    "no_model": "I am sorry, I don't know what '{name}' means yet, can you show me what to do?",
    "insufficient_model": "Sorry, I cannot do it with my current knowledge. Can you show me what I should do?",
    "thanks": "Thanks, I think I now know the meaning of '{name}' a bit better.",
}


def verbalize_query(kind: str, relation: RelationSymbol) -> str:
    """Fill one of the three interaction sentence templates."""
    try:
        template = _QUERY_TEMPLATES[kind]
    except KeyError:
        raise ValueError(f"unknown query kind {kind!r}") from None
    return template.format(name=relation.display_name)


# -- catalog file (catalog.json) ---------------------------------------------

def grounding_catalog_to_json(catalog: GroundingCatalog) -> str:
    return json.dumps(
        {
            "objects": catalog.objects,
            "relations": {
                rid: {"display_name": catalog.symbols[rid].display_name, "names": names}
                for rid, names in catalog.relations.items()
            },
        },
        indent=2,
    )


def grounding_catalog_from_json(text: str) -> GroundingCatalog:
    d = json.loads(text)
    relations = {rid: rec["names"] for rid, rec in d["relations"].items()}
    symbols = {
        rid: RelationSymbol(rid, rec["display_name"]) for rid, rec in d["relations"].items()
    }
    return GroundingCatalog(d["objects"], relations, symbols)
