"""Deterministic rule-based plan auditing and a rule-driven refiner.

The auditor covers the geometrically decidable checks: boxes running off the
grid, material overlap between unrelated entities, dangling references,
labels placed out of reach of their object, unreadably small label boxes,
and caption terms with no matching entity. Prompt-semantic judgement is the
LLM auditor's job and lives elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .evalsuite import match_description
from .model import (
    GRID_SIDE,
    DiagramPlan,
    EntityKind,
    GridBox,
    RelationKind,
    StructuralViolation,
    ViolationRule,
    iou,
    validate_structure,
)


class IssueKind(str, Enum):
    CAPTION_ENTITY_GAP = "caption_entity_gap"
    DANGLING_REFERENCE = "dangling_reference"
    OUT_OF_BOUNDS = "out_of_bounds"
    OVERLAP = "overlap"
    TINY_TEXT = "tiny_text"
    UNREACHABLE_LABEL = "unreachable_label"


class Verdict(str, Enum):
    APPROVED = "approved"
    NEEDS_REVISION = "needs_revision"


@dataclass(frozen=True)
class AuditConfig:
    overlap_iou_threshold: float = 0.05
    label_reach: float = 25.0
    tiny_text_min_height: int = 3
    required_terms: tuple[str, ...] = ()


@dataclass(frozen=True)
class AuditIssue:
    kind: IssueKind
    subjects: tuple[str, ...]
    message: str
    measure: float | tuple[float, float] | None = None

    def to_dict(self) -> dict:
        measure = list(self.measure) if isinstance(self.measure, tuple) else self.measure
        return {
            "kind": self.kind.value,
            "subjects": list(self.subjects),
            "message": self.message,
            "measure": measure,
        }


@dataclass(frozen=True)
class AuditReport:
    issues: tuple[AuditIssue, ...]

    @property
    def verdict(self) -> Verdict:
        return Verdict.APPROVED if not self.issues else Verdict.NEEDS_REVISION

    @property
    def approved(self) -> bool:
        return not self.issues

    def feedback_text(self) -> str:
        return "\n".join(issue.message for issue in self.issues)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "issues": [issue.to_dict() for issue in self.issues],
        }


def _point_box_distance(px: float, py: float, box: GridBox) -> float:
    dx = max(box.x - px, 0.0, px - box.right)
    dy = max(box.y - py, 0.0, py - box.bottom)
    return math.hypot(dx, dy)


def _split_violations(
    violations: list[StructuralViolation],
) -> tuple[list[StructuralViolation], list[StructuralViolation]]:
    dangling = [v for v in violations if v.rule is ViolationRule.DANGLING_REFERENCE]
    fatal = [v for v in violations if v.rule is not ViolationRule.DANGLING_REFERENCE]
    return dangling, fatal


def audit_plan(plan: DiagramPlan, config: AuditConfig = AuditConfig()) -> AuditReport:
    """Run every rule and return the issues sorted by (kind, subjects).

    Dangling references are reported as issues rather than raised, so a plan
    that is broken in exactly that way can still be audited; any other
    structural violation raises ValueError.
    """
    dangling, fatal = _split_violations(validate_structure(plan))
    if fatal:
        raise ValueError(
            "structurally invalid plan: " + "; ".join(v.message for v in fatal)
        )

    issues: list[AuditIssue] = [
        AuditIssue(IssueKind.DANGLING_REFERENCE, v.subjects, v.message)
        for v in dangling
    ]

    placed = [e for e in plan.entities if e.id in plan.layouts]
    for ent in placed:
        box = plan.layouts[ent.id]
        overflow_x = max(0, box.right - GRID_SIDE)
        overflow_y = max(0, box.bottom - GRID_SIDE)
        if overflow_x or overflow_y:
            issues.append(
                AuditIssue(
                    IssueKind.OUT_OF_BOUNDS,
                    (ent.id,),
                    f"box of {ent.id} runs off the grid by ({overflow_x}, {overflow_y})",
                    measure=(float(overflow_x), float(overflow_y)),
                )
            )

    related = set()
    for rel in plan.relationships:
        if rel.kind in (RelationKind.LABELS, RelationKind.ARROW):
            related.add(frozenset((rel.source, rel.target)))
    for i, a in enumerate(placed):
        for b in placed[i + 1 :]:
            if frozenset((a.id, b.id)) in related:
                continue
            value = iou(plan.layouts[a.id], plan.layouts[b.id])
            if value > config.overlap_iou_threshold:
                issues.append(
                    AuditIssue(
                        IssueKind.OVERLAP,
                        (a.id, b.id),
                        f"{a.id} and {b.id} overlap with IoU {value:.3f}",
                        measure=value,
                    )
                )

    for rel in plan.relationships:
        if rel.kind is not RelationKind.LABELS:
            continue
        if rel.source not in plan.layouts or rel.target not in plan.layouts:
            continue
        cx, cy = plan.layouts[rel.source].center
        distance = _point_box_distance(cx, cy, plan.layouts[rel.target])
        if distance > config.label_reach:
            issues.append(
                AuditIssue(
                    IssueKind.UNREACHABLE_LABEL,
                    (rel.source, rel.target),
                    f"label {rel.source} sits {distance:.1f} grid units from {rel.target}",
                    measure=distance,
                )
            )

    for ent in placed:
        if ent.kind is EntityKind.TEXT_LABEL:
            height = plan.layouts[ent.id].h
            if height < config.tiny_text_min_height:
                issues.append(
                    AuditIssue(
                        IssueKind.TINY_TEXT,
                        (ent.id,),
                        f"label box of {ent.id} is only {height} grid units tall",
                        measure=float(height),
                    )
                )

    for term in config.required_terms:
        if not any(match_description(term, e.description) for e in plan.entities):
            issues.append(
                AuditIssue(
                    IssueKind.CAPTION_ENTITY_GAP,
                    (term,),
                    f"no entity matches required term {term!r}",
                )
            )

    issues.sort(key=lambda issue: (issue.kind.value, issue.subjects, issue.message))
    return AuditReport(tuple(issues))


def _clamp_into_grid(box: GridBox) -> GridBox:
    return replace(box, x=min(box.x, GRID_SIDE - box.w), y=min(box.y, GRID_SIDE - box.h))


def _separation_candidates(mover: GridBox, fixed: GridBox) -> list[GridBox]:
    """Translations of `mover` that leave it edge-adjacent to `fixed`,
    least-penetration axis first (ties prefer vertical), preferred direction
    away from the fixed box's center; off-grid positions are dropped."""
    overlap_x = min(mover.right, fixed.right) - max(mover.x, fixed.x)
    overlap_y = min(mover.bottom, fixed.bottom) - max(mover.y, fixed.y)
    if overlap_x <= 0 or overlap_y <= 0:
        return []
    mcx, mcy = mover.center
    fcx, fcy = fixed.center
    axes = [("x", overlap_x), ("y", overlap_y)]
    axes.sort(key=lambda item: item[1])  # stable: ties keep x first
    if overlap_x == overlap_y:
        axes.reverse()  # tie prefers vertical separation
    candidates: list[GridBox] = []
    for axis, _ in axes:
        if axis == "x":
            preferred = 1 if mcx >= fcx else -1
            positions = {1: fixed.right, -1: fixed.x - mover.w}
            for sign in (preferred, -preferred):
                new = positions[sign]
                if 0 <= new and new + mover.w <= GRID_SIDE:
                    candidates.append(replace(mover, x=new))
        else:
            preferred = 1 if mcy >= fcy else -1
            positions = {1: fixed.bottom, -1: fixed.y - mover.h}
            for sign in (preferred, -preferred):
                new = positions[sign]
                if 0 <= new and new + mover.h <= GRID_SIDE:
                    candidates.append(replace(mover, y=new))
    return candidates


def _label_fix(label: GridBox, target: GridBox) -> GridBox:
    x = target.x + (target.w - label.w) // 2
    x = max(0, min(x, GRID_SIDE - label.w))
    y = target.y - 2 - label.h
    y = max(0, min(y, GRID_SIDE - label.h))
    return replace(label, x=x, y=y)


def rule_refine(
    plan: DiagramPlan, report: AuditReport, config: AuditConfig = AuditConfig()
) -> DiagramPlan:
    """Resolve what the rules can resolve by translating boxes.

    Out-of-bounds boxes are clamped onto the grid, overlapping pairs are
    separated by moving the lexicographically later entity, and unreachable
    labels are moved just above their object. A candidate move is kept only
    if it strictly lowers the audited issue count, so refining never makes a
    plan worse; issue kinds with no geometric fix are left for the caller.
    """
    if report.approved:
        return plan

    layouts = dict(plan.layouts)

    def rebuilt() -> DiagramPlan:
        return DiagramPlan(plan.caption, plan.entities, plan.relationships, layouts)

    current_count = len(audit_plan(rebuilt(), config).issues)
    for issue in report.issues:
        candidates: list[GridBox] = []
        subject: str | None = None
        if issue.kind is IssueKind.OUT_OF_BOUNDS:
            subject = issue.subjects[0]
            if subject in layouts:
                candidates = [_clamp_into_grid(layouts[subject])]
        elif issue.kind is IssueKind.OVERLAP:
            first, second = issue.subjects
            subject = max(first, second)
            fixed_id = min(first, second)
            if subject in layouts and fixed_id in layouts:
                candidates = _separation_candidates(layouts[subject], layouts[fixed_id])
        elif issue.kind is IssueKind.UNREACHABLE_LABEL:
            subject, target = issue.subjects
            if subject in layouts and target in layouts:
                candidates = [_label_fix(layouts[subject], layouts[target])]

        for candidate in candidates:
            assert subject is not None
            previous = layouts[subject]
            layouts[subject] = candidate
            new_count = len(audit_plan(rebuilt(), config).issues)
            if new_count < current_count:
                current_count = new_count
                break
            layouts[subject] = previous

    return rebuilt()
