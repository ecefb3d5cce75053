"""Seeded random plan generators and single-defect injectors for tests."""
from __future__ import annotations

import random

from diagramkit.model import (
    DiagramPlan,
    Entity,
    EntityKind,
    GridBox,
    RelationKind,
    Relationship,
)

NOUNS = [
    "sun", "moon", "earth", "comet", "planet", "star", "egg", "larva", "pupa",
    "butterfly", "frog", "tadpole", "leaf", "root", "stem", "flower", "seed",
    "battery", "bulb", "switch", "wire", "resistor", "motor", "cloud", "rain",
    "river", "ocean", "mountain", "core", "mantle", "crust",
]
MODIFIERS = ["adult", "young", "small", "large", "red", "blue", "first", "new", "full"]


def _object_description(rng: random.Random, index: int) -> str:
    noun = rng.choice(NOUNS)
    roll = rng.random()
    if roll < 0.25:
        return f"{rng.choice(MODIFIERS)} {noun}"
    if roll < 0.32:
        return f"{noun} (stage {index})"
    if roll < 0.36:
        return f"fake image (I{index}) {noun}"  # stresses greedy entity parsing
    return noun


def _label_text(rng: random.Random) -> str:
    noun = rng.choice(NOUNS)
    roll = rng.random()
    if roll < 0.15:
        return f'the "{noun}"'
    if roll < 0.22:
        return f"{noun}\\{rng.choice(MODIFIERS)}"
    if roll < 0.3:
        return f"{noun}, {rng.choice(MODIFIERS)}"
    return noun


def random_plan(rng: random.Random, max_objects: int = 5, max_labels: int = 3) -> DiagramPlan:
    """Structurally valid plan with arbitrary geometry (may audit dirty)."""
    n_obj = rng.randint(1, max_objects)
    n_lab = rng.randint(0, max_labels)
    entities: list[Entity] = []
    layouts: dict[str, GridBox] = {}
    for i in range(n_obj):
        entity = Entity(f"I{i}", EntityKind.OBJECT, _object_description(rng, i))
        entities.append(entity)
        layouts[entity.id] = GridBox(
            rng.randint(0, 100), rng.randint(0, 100), rng.randint(1, 100), rng.randint(1, 100)
        )
    for k in range(n_lab):
        entity = Entity(f"T{k}", EntityKind.TEXT_LABEL, _label_text(rng))
        entities.append(entity)
        layouts[entity.id] = GridBox(
            rng.randint(0, 100), rng.randint(0, 100), rng.randint(1, 30), rng.randint(1, 10)
        )
    relationships: list[Relationship] = []
    for i in range(n_obj):
        for j in range(i + 1, n_obj):
            if rng.random() >= 0.3:
                continue
            kind = RelationKind.LINE if rng.random() < 0.25 else RelationKind.ARROW
            src, tgt = (f"I{i}", f"I{j}") if rng.random() < 0.5 else (f"I{j}", f"I{i}")
            relationships.append(Relationship(src, tgt, kind))
    for k in range(n_lab):
        if rng.random() < 0.85:
            relationships.append(
                Relationship(f"T{k}", f"I{rng.randrange(n_obj)}", RelationKind.LABELS)
            )
    caption = f"A diagram of {rng.choice(NOUNS)} and {rng.choice(NOUNS)}"
    return DiagramPlan(caption, entities, relationships, layouts)


def clean_plan(rng: random.Random) -> DiagramPlan:
    """Audit-clean plan: sparse 3x3 cell layout, chained arrows, labels
    tucked under their objects."""
    n_obj = rng.randint(3, 6)
    n_lab = rng.randint(1, n_obj - 2)
    cells = [(5 + col * 32, 5 + row * 32) for row in range(3) for col in range(3)]
    positions = rng.sample(cells, n_obj)
    entities: list[Entity] = []
    layouts: dict[str, GridBox] = {}
    for i in range(n_obj):
        x, y = positions[i]
        entities.append(Entity(f"I{i}", EntityKind.OBJECT, _object_description(rng, i)))
        layouts[f"I{i}"] = GridBox(x, y, rng.randint(8, 12), rng.randint(8, 12))
    for k in range(n_lab):
        obj_box = layouts[f"I{k}"]
        entities.append(Entity(f"T{k}", EntityKind.TEXT_LABEL, entities[k].description))
        layouts[f"T{k}"] = GridBox(obj_box.x, obj_box.bottom + 2, 10, 4)
    relationships = [
        Relationship(f"I{i}", f"I{i + 1}", RelationKind.ARROW) for i in range(n_obj - 1)
    ]
    relationships += [
        Relationship(f"T{k}", f"I{k}", RelationKind.LABELS) for k in range(n_lab)
    ]
    caption = f"A diagram of the {entities[0].description} cycle"
    return DiagramPlan(caption, entities, relationships, layouts)


def _unlabeled_object_ids(plan: DiagramPlan) -> list[str]:
    labeled = {
        rel.target for rel in plan.relationships if rel.kind is RelationKind.LABELS
    }
    return [obj.id for obj in plan.objects if obj.id not in labeled]


def inject_out_of_bounds(plan: DiagramPlan, rng: random.Random) -> DiagramPlan:
    """Push one unlabeled object past the bottom-right grid edge."""
    victim = rng.choice(_unlabeled_object_ids(plan))
    box = plan.layouts[victim]
    layouts = dict(plan.layouts)
    layouts[victim] = GridBox(
        rng.randint(101 - box.w, 100), rng.randint(101 - box.h, 100), box.w, box.h
    )
    return DiagramPlan(plan.caption, plan.entities, plan.relationships, layouts)


def inject_overlap(plan: DiagramPlan, rng: random.Random) -> DiagramPlan:
    """Drop the last (unlabeled) object onto the first object's box."""
    mover = _unlabeled_object_ids(plan)[-1]
    target_box = plan.layouts["I0"]
    layouts = dict(plan.layouts)
    layouts[mover] = target_box
    return DiagramPlan(plan.caption, plan.entities, plan.relationships, layouts)


def inject_dangling(plan: DiagramPlan, rng: random.Random) -> DiagramPlan:
    """Add an arrow to an entity id that was never declared."""
    missing = f"I{len(plan.objects) + rng.randint(3, 9)}"
    relationships = plan.relationships + (
        Relationship("I0", missing, RelationKind.ARROW),
    )
    return DiagramPlan(plan.caption, plan.entities, relationships, plan.layouts)


MUTATORS = {
    "out_of_bounds": inject_out_of_bounds,
    "overlap": inject_overlap,
    "dangling_reference": inject_dangling,
}
