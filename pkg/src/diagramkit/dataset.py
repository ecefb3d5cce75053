"""Ingestion of caption-and-region annotated diagram records.

The JSON schema is this repo's own (documented in docs/dataset-schema.md):
records carry a caption, a topic, pixel-space entity boxes with
descriptions, and relation annotations. Records convert to plans by
rescaling boxes onto the 0-100 grid and reassigning canonical ids, and a
designated train pool supplies the in-context examples; evaluation records
must never be selected as examples.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from .llm import InContextExample
from .model import (
    DiagramPlan,
    Entity,
    EntityKind,
    GridBox,
    RelationKind,
    Relationship,
)

SCHEMA_VERSION = 1

TRAIN_SPLIT = "train"
TEST_SPLIT = "test"


@dataclass(frozen=True)
class EntityAnnotation:
    id: str
    kind: EntityKind
    description: str
    box: tuple[float, float, float, float]  # pixels: x, y, w, h


@dataclass(frozen=True)
class RelationAnnotation:
    source: str
    target: str
    kind: RelationKind


@dataclass(frozen=True)
class DatasetRecord:
    record_id: str
    caption: str
    topic: str
    image_size: tuple[float, float]
    entities: tuple[EntityAnnotation, ...]
    relations: tuple[RelationAnnotation, ...]
    split: str = TRAIN_SPLIT


@dataclass
class LoadedDataset:
    records: list[DatasetRecord]
    skipped: int = 0
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[DatasetRecord]:
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]


def _record_problems(record: DatasetRecord) -> list[str]:
    problems: list[str] = []
    width, height = record.image_size
    if width <= 0 or height <= 0:
        return [f"record {record.record_id}: image size must be positive"]
    seen: dict[str, EntityAnnotation] = {}
    for ann in record.entities:
        if ann.id in seen:
            problems.append(f"record {record.record_id}: duplicate entity id {ann.id}")
            continue
        seen[ann.id] = ann
        if not ann.description.strip():
            problems.append(f"record {record.record_id}: entity {ann.id} has no description")
        x, y, w, h = ann.box
        if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > width or y + h > height:
            problems.append(
                f"record {record.record_id}: box of {ann.id} outside the {width}x{height} image"
            )
    for rel in record.relations:
        if rel.source == rel.target:
            problems.append(f"record {record.record_id}: relation links {rel.source} to itself")
            continue
        if rel.source not in seen or rel.target not in seen:
            problems.append(
                f"record {record.record_id}: relation references unknown id "
                f"{rel.source if rel.source not in seen else rel.target}"
            )
            continue
        src, tgt = seen[rel.source], seen[rel.target]
        if rel.kind is RelationKind.LABELS:
            if src.kind is not EntityKind.TEXT_LABEL or tgt.kind is not EntityKind.OBJECT:
                problems.append(
                    f"record {record.record_id}: labels relation {rel.source}->{rel.target} has wrong kinds"
                )
        elif src.kind is not EntityKind.OBJECT or tgt.kind is not EntityKind.OBJECT:
            problems.append(
                f"record {record.record_id}: {rel.kind.value} relation must connect objects"
            )
    return problems


def _parse_record(raw: dict) -> DatasetRecord:
    size = raw["image_size"]
    return DatasetRecord(
        record_id=str(raw["id"]),
        caption=str(raw["caption"]),
        topic=str(raw.get("topic", "")),
        image_size=(float(size[0]), float(size[1])),
        entities=tuple(
            EntityAnnotation(
                id=str(item["id"]),
                kind=EntityKind(item["kind"]),
                description=str(item["description"]),
                box=tuple(float(v) for v in item["box"]),
            )
            for item in raw.get("entities", [])
        ),
        relations=tuple(
            RelationAnnotation(str(item["source"]), str(item["target"]), RelationKind(item["kind"]))
            for item in raw.get("relations", [])
        ),
        split=str(raw.get("split", TRAIN_SPLIT)),
    )


def load_records(path: str | Path) -> LoadedDataset:
    """Load a dataset file, skipping (and counting) malformed records."""
    data = json.loads(Path(path).read_text("utf-8"))
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported dataset schema version {version!r} (expected {SCHEMA_VERSION})")
    loaded = LoadedDataset(records=[])
    for position, raw in enumerate(data.get("records", [])):
        try:
            record = _parse_record(raw)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            loaded.skipped += 1
            loaded.warnings.append(f"record #{position}: unparseable ({exc})")
            continue
        problems = _record_problems(record)
        if problems:
            loaded.skipped += 1
            loaded.warnings.extend(problems)
            continue
        loaded.records.append(record)
    return loaded


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def _to_grid(ann: EntityAnnotation, width: float, height: float) -> GridBox:
    x, y, w, h = ann.box
    gx = _round_half_up(x / width * 100)
    gy = _round_half_up(y / height * 100)
    gw = max(1, _round_half_up(w / width * 100))
    gh = max(1, _round_half_up(h / height * 100))
    return GridBox(min(gx, 100), min(gy, 100), min(gw, 100), min(gh, 100))


def record_to_plan(record: DatasetRecord) -> DiagramPlan:
    """Convert one record into a structurally valid plan.

    Pixel boxes are rescaled to the grid (round half-up, at least one grid
    unit per side) and ids are reassigned canonically (I0..., T0...) in
    annotation order, with relations remapped to the new ids.
    """
    width, height = record.image_size
    id_map: dict[str, str] = {}
    entities: list[Entity] = []
    layouts: dict[str, GridBox] = {}
    counters = {EntityKind.OBJECT: 0, EntityKind.TEXT_LABEL: 0}
    for ann in record.entities:
        prefix = "I" if ann.kind is EntityKind.OBJECT else "T"
        new_id = f"{prefix}{counters[ann.kind]}"
        counters[ann.kind] += 1
        id_map[ann.id] = new_id
        entities.append(Entity(new_id, ann.kind, ann.description.strip()))
        layouts[new_id] = _to_grid(ann, width, height)
    relationships = tuple(
        Relationship(id_map[rel.source], id_map[rel.target], rel.kind)
        for rel in record.relations
    )
    return DiagramPlan(record.caption, entities, relationships, layouts)


def train_records(records: Sequence[DatasetRecord]) -> list[DatasetRecord]:
    return [record for record in records if record.split == TRAIN_SPLIT]


def select_examples(
    records: Sequence[DatasetRecord], n: int, topic: str | None = None
) -> list[InContextExample]:
    """Pick exactly n in-context examples, topic matches first.

    Selection is deterministic: topic-matching records in their stored
    order, padded with the remaining records in order.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > len(records):
        raise ValueError(f"asked for {n} examples but the pool has {len(records)}")
    if topic:
        wanted = topic.strip().lower()
        matching = [r for r in records if r.topic.strip().lower() == wanted]
        others = [r for r in records if r.topic.strip().lower() != wanted]
        ordered = matching + others
    else:
        ordered = list(records)
    return [
        InContextExample(record.caption, record.topic, record_to_plan(record))
        for record in ordered[:n]
    ]
