"""Core data model for diagram plans and bounding-box geometry.

A plan places entities (objects and text labels) on an integer 100x100 grid
with the origin at the top-left corner and y growing downward. All types are
immutable values; every operation here is a pure function.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

GRID_SIDE = 100
CENTER_MARGIN = 2.0
BETWEEN_TOLERANCE = 10.0

_ID_RE = re.compile(r"^[IT]\d+$")


class EntityKind(str, Enum):
    OBJECT = "object"
    TEXT_LABEL = "text_label"


class RelationKind(str, Enum):
    ARROW = "arrow"
    LINE = "line"
    LABELS = "labels"


class SpatialRelation(str, Enum):
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"
    ABOVE = "above"
    BELOW = "below"
    OVERLAPPING = "overlapping"


@dataclass(frozen=True)
class GridBox:
    """Axis-aligned box in grid units: [x, y, w, h] with 0..100 coordinates.

    x+w and y+h may exceed 100; that is an audit finding, not a modelling
    error, so it is deliberately not rejected here.
    """

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        for name in ("x", "y", "w", "h"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"box field {name} must be an integer, got {value!r}")
        if not (0 <= self.x <= GRID_SIDE and 0 <= self.y <= GRID_SIDE):
            raise ValueError(f"box position out of range: ({self.x}, {self.y})")
        if not (1 <= self.w <= GRID_SIDE and 1 <= self.h <= GRID_SIDE):
            raise ValueError(f"box size out of range: ({self.w}, {self.h})")

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class PixelRect:
    """Box scaled onto a square pixel canvas."""

    x: float
    y: float
    w: float
    h: float


@dataclass(frozen=True)
class Entity:
    id: str
    kind: EntityKind
    description: str

    def __post_init__(self) -> None:
        if not _ID_RE.match(self.id):
            raise ValueError(f"entity id must look like I0 or T0, got {self.id!r}")
        expected = EntityKind.OBJECT if self.id.startswith("I") else EntityKind.TEXT_LABEL
        if self.kind is not expected:
            raise ValueError(f"entity id {self.id!r} does not match kind {self.kind.value}")
        if not self.description.strip():
            raise ValueError(f"entity {self.id} has an empty description")
        if "\n" in self.description or "\r" in self.description:
            raise ValueError(f"entity {self.id} description contains a line break")
        if self.description != self.description.strip():
            raise ValueError(f"entity {self.id} description has surrounding whitespace")


@dataclass(frozen=True)
class Relationship:
    source: str
    target: str
    kind: RelationKind

    def __post_init__(self) -> None:
        for endpoint in (self.source, self.target):
            if not _ID_RE.match(endpoint):
                raise ValueError(f"relationship endpoint must be an entity id, got {endpoint!r}")


@dataclass(frozen=True)
class DiagramPlan:
    """Entities, relationships, and layouts for one diagram.

    Entity and relationship order is declaration order and is preserved by
    serialization. Cross-reference rules are checked by validate_structure,
    not at construction time, so that violations can be reported as data.
    """

    caption: str
    entities: tuple[Entity, ...]
    relationships: tuple[Relationship, ...]
    layouts: dict[str, GridBox]

    def __init__(
        self,
        caption: str,
        entities: Iterable[Entity] = (),
        relationships: Iterable[Relationship] = (),
        layouts: Mapping[str, GridBox] | None = None,
    ) -> None:
        object.__setattr__(self, "caption", caption)
        object.__setattr__(self, "entities", tuple(entities))
        object.__setattr__(self, "relationships", tuple(relationships))
        object.__setattr__(self, "layouts", dict(layouts or {}))

    def entity(self, entity_id: str) -> Entity:
        for ent in self.entities:
            if ent.id == entity_id:
                return ent
        raise KeyError(entity_id)

    @property
    def objects(self) -> tuple[Entity, ...]:
        return tuple(e for e in self.entities if e.kind is EntityKind.OBJECT)

    @property
    def text_labels(self) -> tuple[Entity, ...]:
        return tuple(e for e in self.entities if e.kind is EntityKind.TEXT_LABEL)

    def relationships_of_kind(self, kind: RelationKind) -> tuple[Relationship, ...]:
        return tuple(r for r in self.relationships if r.kind is kind)


class ViolationRule(str, Enum):
    DUPLICATE_ID = "duplicate_id"
    SELF_REFERENCE = "self_reference"
    DANGLING_REFERENCE = "dangling_reference"
    BAD_LABELS_LINK = "bad_labels_link"
    BAD_CONNECTOR_LINK = "bad_connector_link"
    MISSING_LAYOUT = "missing_layout"


@dataclass(frozen=True)
class StructuralViolation:
    rule: ViolationRule
    subjects: tuple[str, ...]
    message: str


def validate_structure(plan: DiagramPlan) -> list[StructuralViolation]:
    """Check all plan-level invariants; an empty list means the plan is valid."""
    violations: list[StructuralViolation] = []
    seen: dict[str, Entity] = {}
    for ent in plan.entities:
        if ent.id in seen:
            violations.append(
                StructuralViolation(
                    ViolationRule.DUPLICATE_ID,
                    (ent.id,),
                    f"entity id {ent.id} declared more than once",
                )
            )
        else:
            seen[ent.id] = ent

    for rel in plan.relationships:
        if rel.source == rel.target:
            violations.append(
                StructuralViolation(
                    ViolationRule.SELF_REFERENCE,
                    (rel.source,),
                    f"relationship links {rel.source} to itself",
                )
            )
            continue
        missing = [eid for eid in (rel.source, rel.target) if eid not in seen]
        if missing:
            for eid in missing:
                violations.append(
                    StructuralViolation(
                        ViolationRule.DANGLING_REFERENCE,
                        (eid,),
                        f"relationship references undeclared entity {eid}",
                    )
                )
            continue
        src, tgt = seen[rel.source], seen[rel.target]
        if rel.kind is RelationKind.LABELS:
            if src.kind is not EntityKind.TEXT_LABEL or tgt.kind is not EntityKind.OBJECT:
                violations.append(
                    StructuralViolation(
                        ViolationRule.BAD_LABELS_LINK,
                        (rel.source, rel.target),
                        f"labels link must go from a text label to an object: {rel.source} labels {rel.target}",
                    )
                )
        else:
            if src.kind is not EntityKind.OBJECT or tgt.kind is not EntityKind.OBJECT:
                violations.append(
                    StructuralViolation(
                        ViolationRule.BAD_CONNECTOR_LINK,
                        (rel.source, rel.target),
                        f"{rel.kind.value} must connect two objects: {rel.source} -> {rel.target}",
                    )
                )

    for ent in plan.entities:
        if ent.id not in plan.layouts:
            violations.append(
                StructuralViolation(
                    ViolationRule.MISSING_LAYOUT,
                    (ent.id,),
                    f"entity {ent.id} has no layout box",
                )
            )
    for layout_id in plan.layouts:
        if layout_id not in seen:
            violations.append(
                StructuralViolation(
                    ViolationRule.DANGLING_REFERENCE,
                    (layout_id,),
                    f"layout references undeclared entity {layout_id}",
                )
            )
    return violations


def is_structurally_valid(plan: DiagramPlan) -> bool:
    return not validate_structure(plan)


def require_valid(plan: DiagramPlan) -> None:
    """Raise ValueError listing every violation if the plan is not valid."""
    violations = validate_structure(plan)
    if violations:
        summary = "; ".join(v.message for v in violations)
        raise ValueError(f"structurally invalid plan: {summary}")


def to_pixels(box: GridBox, canvas_side: float) -> PixelRect:
    """Scale a grid box onto a square canvas of the given side length."""
    if canvas_side <= 0:
        raise ValueError(f"canvas side must be positive, got {canvas_side}")
    k = canvas_side / GRID_SIDE
    return PixelRect(box.x * k, box.y * k, box.w * k, box.h * k)


def iou(a: GridBox, b: GridBox) -> float:
    """Intersection-over-union of two boxes; 0.0 when disjoint."""
    ix = min(a.right, b.right) - max(a.x, b.x)
    iy = min(a.bottom, b.bottom) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union


def spatial_relation(
    a: GridBox, b: GridBox, margin: float = CENTER_MARGIN
) -> set[SpatialRelation]:
    """Directional relations of a with respect to b, plus overlap.

    Directions compare box centers with a margin, so near-ties in one axis
    yield no relation on that axis; left/right and above/below can co-occur.
    """
    acx, acy = a.center
    bcx, bcy = b.center
    relations: set[SpatialRelation] = set()
    if acx + margin <= bcx:
        relations.add(SpatialRelation.LEFT_OF)
    if bcx + margin <= acx:
        relations.add(SpatialRelation.RIGHT_OF)
    if acy + margin <= bcy:
        relations.add(SpatialRelation.ABOVE)
    if bcy + margin <= acy:
        relations.add(SpatialRelation.BELOW)
    if iou(a, b) > 0:
        relations.add(SpatialRelation.OVERLAPPING)
    return relations


def is_between(
    mid: GridBox, a: GridBox, b: GridBox, tolerance: float = BETWEEN_TOLERANCE
) -> bool:
    """True when mid's center projects strictly inside segment a-b and sits
    within `tolerance` grid units of that segment (symmetric in a and b).

    Computed on doubled centers so everything stays integer and boundary
    cases are exact.
    """
    ax, ay = 2 * a.x + a.w, 2 * a.y + a.h
    bx, by = 2 * b.x + b.w, 2 * b.y + b.h
    mx, my = 2 * mid.x + mid.w, 2 * mid.y + mid.h
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0:
        return False
    dot = (mx - ax) * dx + (my - ay) * dy
    if not (0 < dot < seg_sq):
        return False
    cross = (mx - ax) * dy - (my - ay) * dx
    return cross * cross <= (2 * tolerance) ** 2 * seg_sq


def anchors(box: GridBox) -> tuple[tuple[float, float], ...]:
    """Edge-midpoint anchors in fixed order: top, right, bottom, left."""
    cx, cy = box.center
    return (
        (cx, float(box.y)),
        (float(box.right), cy),
        (cx, float(box.bottom)),
        (float(box.x), cy),
    )


def anchor_pair(
    a: GridBox, b: GridBox
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Closest pair among the 16 anchor combinations of two boxes.

    Ties are broken by anchor order (top, right, bottom, left) on a, then b,
    which keeps arrow endpoints deterministic.
    """
    best: tuple[tuple[float, float], tuple[float, float]] | None = None
    best_dist = math.inf
    for pa in anchors(a):
        for pb in anchors(b):
            dist = math.hypot(pa[0] - pb[0], pa[1] - pb[1])
            if dist < best_dist:
                best_dist = dist
                best = (pa, pb)
    assert best is not None
    return best


# Canonical JSON schema: {caption, entities[{id,kind,description}],
# relationships[{source,target,kind}], layouts{id:[x,y,w,h]}}.

def plan_to_dict(plan: DiagramPlan) -> dict:
    return {
        "caption": plan.caption,
        "entities": [
            {"id": e.id, "kind": e.kind.value, "description": e.description}
            for e in plan.entities
        ],
        "relationships": [
            {"source": r.source, "target": r.target, "kind": r.kind.value}
            for r in plan.relationships
        ],
        "layouts": {eid: box.as_list() for eid, box in plan.layouts.items()},
    }


def _grid_coord(value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"layout coordinate must be a number, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"layout coordinate must be an integer, got {value!r}")
        value = int(value)
    return value


def plan_from_dict(data: Mapping) -> DiagramPlan:
    """Build a plan from the canonical JSON shape.

    Raises ValueError on malformed fields; cross-reference problems are left
    to validate_structure so callers can report them as a violation list.
    """
    if not isinstance(data, Mapping):
        raise ValueError("plan JSON must be an object")
    try:
        entities = tuple(
            Entity(str(item["id"]), EntityKind(item["kind"]), str(item["description"]))
            for item in data.get("entities", [])
        )
        relationships = tuple(
            Relationship(str(item["source"]), str(item["target"]), RelationKind(item["kind"]))
            for item in data.get("relationships", [])
        )
        layouts = {}
        for eid, raw in dict(data.get("layouts", {})).items():
            if not isinstance(raw, (list, tuple)) or len(raw) != 4:
                raise ValueError(f"layout for {eid} must be [x, y, w, h]")
            layouts[str(eid)] = GridBox(*(_grid_coord(v) for v in raw))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed plan JSON: {exc}") from exc
    caption = data.get("caption", "")
    if not isinstance(caption, str):
        raise ValueError("caption must be a string")
    return DiagramPlan(caption, entities, relationships, layouts)
