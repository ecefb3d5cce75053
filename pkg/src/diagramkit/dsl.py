"""Parser and serializer for the textual diagram-plan format.

The text form has three sections ("Required Entities:", "Entity
Relationships:", "Entity Locations:") with one declaration per line, e.g.::

    Required Entities:
    egg image (I0)
    "egg" text label (T0)
    Entity Relationships:
    T0 labels I0
    Entity Locations:
    I0 is located at [24, 50, 14, 14]
    T0 is located at [20, 44, 10, 4]

serialize_plan emits the canonical form; parse_plan accepts it back plus the
usual sloppiness of generated text (odd spacing, stray prose lines, repeated
location lines). parse(serialize(p)) == p for every structurally valid plan.
"""
from __future__ import annotations

import logging
import re

from .model import (
    DiagramPlan,
    Entity,
    EntityKind,
    GridBox,
    RelationKind,
    Relationship,
    require_valid,
)

logger = logging.getLogger(__name__)

SECTION_HEADERS = ("required entities:", "entity relationships:", "entity locations:")

_OBJECT_RE = re.compile(r"^(?P<desc>.+) image \((?P<id>I\d+)\)$")
_LABEL_RE = re.compile(r'^"(?P<text>(?:[^"\\]|\\.)*)" text label \((?P<id>T\d+)\)$')
_ARROW_RE = re.compile(r"^(?P<src>[IT]\d+) has an arrow to (?P<tgt>[IT]\d+)$")
_LINE_RE = re.compile(r"^(?P<src>[IT]\d+) has a line to (?P<tgt>[IT]\d+)$")
_LABELS_RE = re.compile(r"^(?P<src>[IT]\d+) labels (?P<tgt>[IT]\d+)$")
_LOCATION_RE = re.compile(
    r"^(?P<id>[IT]\d+) is located at "
    r"\[(?P<x>-?\d+),\s*(?P<y>-?\d+),\s*(?P<w>-?\d+),\s*(?P<h>-?\d+)\]$"
)

# A line carrying one of these fragments was meant as a declaration, so a
# failed match is a parse error rather than an ignorable stray line.
_SIGNATURES = (
    " image (",
    " text label (",
    " has an arrow to ",
    " has a line to ",
    " labels ",
    " is located at ",
)


class PlanTextError(Exception):
    """Base class for plan-text problems."""


class PlanParseError(PlanTextError):
    def __init__(self, line_no: int, text: str, expected: str) -> None:
        super().__init__(f"line {line_no}: {expected} (got {text!r})")
        self.line_no = line_no
        self.text = text
        self.expected = expected


class DanglingReferenceError(PlanParseError):
    def __init__(self, line_no: int, text: str, entity_id: str) -> None:
        super().__init__(line_no, text, f"reference to undeclared entity {entity_id}")
        self.entity_id = entity_id


class MissingLayoutError(PlanTextError):
    def __init__(self, entity_ids: list[str]) -> None:
        super().__init__(f"no location line for: {', '.join(entity_ids)}")
        self.entity_ids = entity_ids


def _escape_label(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _unescape_label(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text)


def parse_plan(
    text: str, caption: str = "", warnings: list[str] | None = None
) -> DiagramPlan:
    """Parse plan text into a structurally valid DiagramPlan.

    The caption is supplied out of band (the text format carries none).
    Stray lines are skipped; pass a list as `warnings` to collect the skip
    and duplicate-location notices, otherwise they go to the module logger.
    """

    def warn(message: str) -> None:
        if warnings is not None:
            warnings.append(message)
        else:
            logger.warning(message)

    entities: list[Entity] = []
    ids: dict[str, Entity] = {}
    relationships: list[Relationship] = []
    layouts: dict[str, GridBox] = {}

    def declare(entity: Entity, line_no: int, line: str) -> None:
        if entity.id in ids:
            raise PlanParseError(line_no, line, f"duplicate entity id {entity.id}")
        ids[entity.id] = entity
        entities.append(entity)

    def resolve(entity_id: str, line_no: int, line: str) -> Entity:
        if entity_id not in ids:
            raise DanglingReferenceError(line_no, line, entity_id)
        return ids[entity_id]

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.lower() in SECTION_HEADERS:
            continue

        m = _OBJECT_RE.match(line)
        if m:
            try:
                entity = Entity(m.group("id"), EntityKind.OBJECT, m.group("desc"))
            except ValueError as exc:
                raise PlanParseError(line_no, line, str(exc)) from exc
            declare(entity, line_no, line)
            continue

        m = _LABEL_RE.match(line)
        if m:
            try:
                entity = Entity(
                    m.group("id"), EntityKind.TEXT_LABEL, _unescape_label(m.group("text"))
                )
            except ValueError as exc:
                raise PlanParseError(line_no, line, str(exc)) from exc
            declare(entity, line_no, line)
            continue

        rel_kind: RelationKind | None = None
        for pattern, kind in (
            (_ARROW_RE, RelationKind.ARROW),
            (_LINE_RE, RelationKind.LINE),
            (_LABELS_RE, RelationKind.LABELS),
        ):
            m = pattern.match(line)
            if m:
                rel_kind = kind
                break
        if m and rel_kind is not None:
            src = resolve(m.group("src"), line_no, line)
            tgt = resolve(m.group("tgt"), line_no, line)
            if src.id == tgt.id:
                raise PlanParseError(line_no, line, "relationship endpoints must differ")
            if rel_kind is RelationKind.LABELS:
                if src.kind is not EntityKind.TEXT_LABEL or tgt.kind is not EntityKind.OBJECT:
                    raise PlanParseError(
                        line_no, line, "labels must link a text label to an object"
                    )
            elif src.kind is not EntityKind.OBJECT or tgt.kind is not EntityKind.OBJECT:
                raise PlanParseError(
                    line_no, line, f"{rel_kind.value} must connect two objects"
                )
            relationships.append(Relationship(src.id, tgt.id, rel_kind))
            continue

        m = _LOCATION_RE.match(line)
        if m:
            entity = resolve(m.group("id"), line_no, line)
            try:
                box = GridBox(*(int(m.group(g)) for g in ("x", "y", "w", "h")))
            except ValueError as exc:
                raise PlanParseError(line_no, line, str(exc)) from exc
            if entity.id in layouts:
                warn(f"line {line_no}: duplicate location for {entity.id}, last one wins")
            layouts[entity.id] = box
            continue

        if any(sig in line for sig in _SIGNATURES):
            raise PlanParseError(line_no, line, "malformed declaration")
        warn(f"line {line_no}: skipped unrecognized line {line!r}")

    missing = [e.id for e in entities if e.id not in layouts]
    if missing:
        raise MissingLayoutError(missing)

    plan = DiagramPlan(caption, entities, relationships, layouts)
    require_valid(plan)
    return plan


def serialize_plan(plan: DiagramPlan) -> str:
    """Emit the canonical text form: three sections in declaration order,
    one space after commas in boxes, label text double-quoted."""
    require_valid(plan)
    lines = ["Required Entities:"]
    for ent in plan.entities:
        if ent.kind is EntityKind.OBJECT:
            lines.append(f"{ent.description} image ({ent.id})")
        else:
            lines.append(f'"{_escape_label(ent.description)}" text label ({ent.id})')
    lines.append("Entity Relationships:")
    for rel in plan.relationships:
        if rel.kind is RelationKind.ARROW:
            lines.append(f"{rel.source} has an arrow to {rel.target}")
        elif rel.kind is RelationKind.LINE:
            lines.append(f"{rel.source} has a line to {rel.target}")
        else:
            lines.append(f"{rel.source} labels {rel.target}")
    lines.append("Entity Locations:")
    for ent in plan.entities:
        box = plan.layouts[ent.id]
        lines.append(f"{ent.id} is located at [{box.x}, {box.y}, {box.w}, {box.h}]")
    return "\n".join(lines) + "\n"
