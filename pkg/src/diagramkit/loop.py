"""Orchestration of initial plan generation and the iterative
planner-auditor refinement loop.

Auditing and revision each come in an LLM flavour and a deterministic rules
flavour, so the full loop can run offline; in Both mode the rule findings
are appended to the LLM feedback and keep the loop running even when the
LLM approves, because geometric defects are objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .audit import AuditConfig, AuditIssue, Verdict, audit_plan, rule_refine
from .llm import (
    DEFAULT_APPROVAL_MARKER,
    CompletionClient,
    CompletionError,
    GenerationFailedError,
    InContextExample,
    build_auditor_prompt,
    build_planner_prompt,
    build_revision_prompt,
    parse_auditor_completion,
    request_plan,
)
from .model import DiagramPlan

DEFAULT_MAX_ITERATIONS = 4


class AuditorMode(str, Enum):
    LLM = "llm"
    RULES = "rules"
    BOTH = "both"


class RefinerMode(str, Enum):
    LLM = "llm"
    RULES = "rules"


class Termination(str, Enum):
    APPROVED = "approved"
    MAX_ITERATIONS = "max_iterations"
    ERROR = "error"


@dataclass(frozen=True)
class LoopConfig:
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    auditor_mode: AuditorMode = AuditorMode.RULES
    refiner_mode: RefinerMode = RefinerMode.RULES
    audit: AuditConfig = field(default_factory=AuditConfig)
    examples: tuple[InContextExample, ...] = ()
    topic: str = ""
    approval_marker: str = DEFAULT_APPROVAL_MARKER
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")

    @property
    def needs_client(self) -> bool:
        return (
            self.auditor_mode is not AuditorMode.RULES
            or self.refiner_mode is RefinerMode.LLM
        )


@dataclass(frozen=True)
class LoopStep:
    plan: DiagramPlan
    verdict: Verdict
    feedback: str
    issues: tuple[AuditIssue, ...] = ()
    revision_source: str | None = None

    def to_dict(self) -> dict:
        from .model import plan_to_dict

        return {
            "plan": plan_to_dict(self.plan),
            "verdict": self.verdict.value,
            "feedback": self.feedback,
            "issues": [issue.to_dict() for issue in self.issues],
            "revision_source": self.revision_source,
        }


@dataclass(frozen=True)
class LoopTrace:
    steps: tuple[LoopStep, ...]
    final_plan: DiagramPlan
    termination: Termination

    @property
    def revisions(self) -> int:
        return sum(1 for step in self.steps if step.revision_source is not None)

    @property
    def snapshots(self) -> tuple[DiagramPlan, ...]:
        plans = [step.plan for step in self.steps]
        if not plans or plans[-1] is not self.final_plan:
            plans.append(self.final_plan)
        return tuple(plans)

    def to_dict(self) -> dict:
        from .model import plan_to_dict

        return {
            "termination": self.termination.value,
            "steps": [step.to_dict() for step in self.steps],
            "final_plan": plan_to_dict(self.final_plan),
        }


def generate_initial_plan(
    caption: str,
    topic: str,
    client: CompletionClient,
    examples: Sequence[InContextExample],
) -> DiagramPlan:
    """Produce the first draft plan for a caption via in-context examples."""
    prompt = build_planner_prompt(caption, topic, examples)
    return request_plan(client, prompt, caption)


def refine_loop(
    plan: DiagramPlan,
    caption: str,
    config: LoopConfig = LoopConfig(),
    client: CompletionClient | None = None,
) -> tuple[DiagramPlan, LoopTrace]:
    """Audit and revise the plan until approval or the iteration budget runs
    out; every snapshot in the returned trace is structurally valid."""
    if config.needs_client and client is None:
        raise ValueError(f"{config.auditor_mode.value}/{config.refiner_mode.value} mode requires a completion client")

    current = plan
    steps: list[LoopStep] = []

    def finish(termination: Termination) -> tuple[DiagramPlan, LoopTrace]:
        return current, LoopTrace(tuple(steps), current, termination)

    for _ in range(config.max_iterations):
        rule_report = None
        if config.auditor_mode is not AuditorMode.LLM or config.refiner_mode is RefinerMode.RULES:
            rule_report = audit_plan(current, config.audit)

        if config.auditor_mode is AuditorMode.RULES:
            assert rule_report is not None
            approved = rule_report.approved
            feedback = rule_report.feedback_text()
        else:
            assert client is not None
            prompt = build_auditor_prompt(current, caption, config.examples, config.topic)
            try:
                completion = client.complete(prompt, temperature=config.temperature)
            except CompletionError:
                steps.append(LoopStep(current, Verdict.NEEDS_REVISION, "auditor unavailable"))
                return finish(Termination.ERROR)
            llm_feedback = parse_auditor_completion(completion, config.approval_marker)
            if config.auditor_mode is AuditorMode.BOTH:
                assert rule_report is not None
                approved = llm_feedback.approved and rule_report.approved
                feedback = "\n".join(
                    part
                    for part in (llm_feedback.feedback_text, rule_report.feedback_text())
                    if part
                )
            else:
                approved = llm_feedback.approved
                feedback = llm_feedback.feedback_text

        issues = rule_report.issues if rule_report is not None else ()
        if approved:
            steps.append(LoopStep(current, Verdict.APPROVED, feedback, issues))
            return finish(Termination.APPROVED)

        if config.refiner_mode is RefinerMode.RULES:
            assert rule_report is not None
            revised = rule_refine(current, rule_report, config.audit)
            source = "rules"
        else:
            assert client is not None
            prompt = build_revision_prompt(
                caption, config.topic, config.examples, current, feedback
            )
            try:
                revised = request_plan(
                    client, prompt, caption, temperature=config.temperature
                )
            except (GenerationFailedError, CompletionError):
                steps.append(LoopStep(current, Verdict.NEEDS_REVISION, feedback, issues))
                return finish(Termination.ERROR)
            source = "llm"

        steps.append(
            LoopStep(current, Verdict.NEEDS_REVISION, feedback, issues, revision_source=source)
        )
        current = revised

    return finish(Termination.MAX_ITERATIONS)
