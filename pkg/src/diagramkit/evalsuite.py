"""Layout-level evaluation of a candidate plan against a ground-truth plan.

Four skills are scored: object presence, exact object counts, text-label
presence, and relationships (declared connections plus spatial relations
derived from the ground-truth geometry). All answers come from exact
geometric oracles on the plans, so scores are deterministic; they are not
comparable to metrics produced by vision models over rendered images.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .model import (
    DiagramPlan,
    Entity,
    RelationKind,
    SpatialRelation,
    is_between,
    require_valid,
    spatial_relation,
)

_PUNCT_RE = re.compile(r"[^\w\s]")

BETWEEN = "between"


class Skill(str, Enum):
    OBJECT = "object"
    COUNT = "count"
    TEXT = "text"
    RELATIONSHIP = "relationship"


def normalize_description(text: str) -> str:
    return " ".join(_PUNCT_RE.sub(" ", text.lower()).split())


def match_description(
    a: str, b: str, synonyms: Iterable[Iterable[str]] | None = None
) -> bool:
    """True when the two descriptions name the same thing.

    Matches on normalized equality, token-multiset containment in either
    direction ("sun" vs "the sun"), or membership in one synonym group.
    """
    na, nb = normalize_description(a), normalize_description(b)
    if na == nb:
        return True
    ta, tb = Counter(na.split()), Counter(nb.split())
    if ta and tb and (ta <= tb or tb <= ta):
        return True
    if synonyms:
        for group in synonyms:
            normalized = {normalize_description(term) for term in group}
            if na in normalized and nb in normalized:
                return True
    return False


@dataclass(frozen=True)
class EvalQuestion:
    """One check against the candidate plan.

    For relationship questions, `description` is the subject (for "between"
    it is the middle entity), `object_description` the other participant,
    and `third_description` the second outer entity of a between-triple.
    """

    skill: Skill
    description: str
    expected_count: int | None = None
    relation: str | None = None
    object_description: str | None = None
    third_description: str | None = None

    def to_dict(self) -> dict:
        data: dict = {"skill": self.skill.value, "description": self.description}
        if self.expected_count is not None:
            data["expected_count"] = self.expected_count
        if self.relation is not None:
            data["relation"] = self.relation
        if self.object_description is not None:
            data["object_description"] = self.object_description
        if self.third_description is not None:
            data["third_description"] = self.third_description
        return data


@dataclass(frozen=True)
class QuestionVerdict:
    question: EvalQuestion
    passed: bool


@dataclass(frozen=True)
class EvalReport:
    verdicts: tuple[QuestionVerdict, ...]

    def skill_accuracy(self, skill: Skill) -> float | None:
        relevant = [v for v in self.verdicts if v.question.skill is skill]
        if not relevant:
            return None
        return 100.0 * sum(v.passed for v in relevant) / len(relevant)

    @property
    def overall(self) -> float | None:
        if not self.verdicts:
            return None
        return 100.0 * sum(v.passed for v in self.verdicts) / len(self.verdicts)

    def to_dict(self) -> dict:
        return {
            "questions": [
                {**v.question.to_dict(), "passed": v.passed} for v in self.verdicts
            ],
            "skills": {skill.value: self.skill_accuracy(skill) for skill in Skill},
            "overall": self.overall,
        }


def questions_from_gt(gt: DiagramPlan) -> list[EvalQuestion]:
    """Derive the evaluation questions a ground-truth plan implies."""
    require_valid(gt)
    questions: list[EvalQuestion] = []
    seen: set = set()

    def add(question: EvalQuestion) -> None:
        if question not in seen:
            seen.add(question)
            questions.append(question)

    objects = gt.objects
    norm_counts = Counter(normalize_description(o.description) for o in objects)
    seen_norms: set[str] = set()
    for obj in objects:
        norm = normalize_description(obj.description)
        if norm in seen_norms:
            continue
        seen_norms.add(norm)
        add(EvalQuestion(Skill.OBJECT, obj.description))
        if norm_counts[norm] >= 2:
            add(
                EvalQuestion(
                    Skill.COUNT, obj.description, expected_count=norm_counts[norm]
                )
            )

    for label in gt.text_labels:
        add(EvalQuestion(Skill.TEXT, label.description))

    for rel in gt.relationships:
        if rel.kind is RelationKind.LABELS:
            continue
        add(
            EvalQuestion(
                Skill.RELATIONSHIP,
                gt.entity(rel.source).description,
                relation=rel.kind.value,
                object_description=gt.entity(rel.target).description,
            )
        )

    for a in objects:
        for b in objects:
            if a.id == b.id:
                continue
            relations = spatial_relation(gt.layouts[a.id], gt.layouts[b.id])
            for spatial in (SpatialRelation.LEFT_OF, SpatialRelation.ABOVE):
                if spatial in relations:
                    add(
                        EvalQuestion(
                            Skill.RELATIONSHIP,
                            a.description,
                            relation=spatial.value,
                            object_description=b.description,
                        )
                    )

    for mid in objects:
        for i, a in enumerate(objects):
            for b in objects[i + 1 :]:
                if mid.id in (a.id, b.id):
                    continue
                if is_between(gt.layouts[mid.id], gt.layouts[a.id], gt.layouts[b.id]):
                    add(
                        EvalQuestion(
                            Skill.RELATIONSHIP,
                            mid.description,
                            relation=BETWEEN,
                            object_description=a.description,
                            third_description=b.description,
                        )
                    )
    return questions


def _matching_objects(
    candidate: DiagramPlan,
    description: str,
    synonyms: Iterable[Iterable[str]] | None,
) -> list[Entity]:
    return [
        obj
        for obj in candidate.objects
        if match_description(obj.description, description, synonyms)
    ]


def _assignments(
    candidate: DiagramPlan,
    descriptions: Sequence[str],
    synonyms: Iterable[Iterable[str]] | None,
):
    """Yield every tuple of distinct candidate objects matching the
    descriptions, in declaration order, so the first satisfying assignment
    is the deterministic witness."""
    pools = [
        _matching_objects(candidate, description, synonyms)
        for description in descriptions
    ]

    def expand(chosen: list[Entity]):
        if len(chosen) == len(pools):
            yield tuple(chosen)
            return
        for obj in pools[len(chosen)]:
            if any(obj.id == picked.id for picked in chosen):
                continue
            chosen.append(obj)
            yield from expand(chosen)
            chosen.pop()

    yield from expand([])


def _answer(
    candidate: DiagramPlan,
    question: EvalQuestion,
    synonyms: Iterable[Iterable[str]] | None,
) -> bool:
    if question.skill is Skill.OBJECT:
        return bool(_matching_objects(candidate, question.description, synonyms))

    if question.skill is Skill.COUNT:
        found = len(_matching_objects(candidate, question.description, synonyms))
        return found == question.expected_count

    if question.skill is Skill.TEXT:
        return any(
            match_description(label.description, question.description, synonyms)
            for label in candidate.text_labels
        )

    assert question.skill is Skill.RELATIONSHIP and question.relation is not None

    if question.relation in (RelationKind.ARROW.value, RelationKind.LINE.value):
        assert question.object_description is not None
        for rel in candidate.relationships:
            if rel.kind.value != question.relation:
                continue
            src = candidate.entity(rel.source).description
            tgt = candidate.entity(rel.target).description
            if match_description(src, question.description, synonyms) and match_description(
                tgt, question.object_description, synonyms
            ):
                return True
            if rel.kind is RelationKind.LINE and match_description(
                src, question.object_description, synonyms
            ) and match_description(tgt, question.description, synonyms):
                return True
        return False

    if question.relation == BETWEEN:
        assert question.object_description and question.third_description
        descriptions = (
            question.description,
            question.object_description,
            question.third_description,
        )
        return any(
            is_between(
                candidate.layouts[mid.id],
                candidate.layouts[a.id],
                candidate.layouts[b.id],
            )
            for mid, a, b in _assignments(candidate, descriptions, synonyms)
        )

    assert question.object_description is not None
    wanted = SpatialRelation(question.relation)
    return any(
        wanted
        in spatial_relation(candidate.layouts[subject.id], candidate.layouts[obj.id])
        for subject, obj in _assignments(
            candidate, (question.description, question.object_description), synonyms
        )
    )


def evaluate(
    candidate: DiagramPlan,
    questions: Sequence[EvalQuestion],
    synonyms: Iterable[Iterable[str]] | None = None,
) -> EvalReport:
    """Answer every question against the candidate plan."""
    require_valid(candidate)
    verdicts = tuple(
        QuestionVerdict(q, _answer(candidate, q, synonyms)) for q in questions
    )
    return EvalReport(verdicts)
