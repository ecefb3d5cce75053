"""diagramkit: text-to-diagram planning, auditing, rendering, and export."""

from .audit import AuditConfig, AuditIssue, AuditReport, IssueKind, Verdict, audit_plan, rule_refine
from .dsl import (
    DanglingReferenceError,
    MissingLayoutError,
    PlanParseError,
    PlanTextError,
    parse_plan,
    serialize_plan,
)
from .evalsuite import (
    EvalQuestion,
    EvalReport,
    Skill,
    evaluate,
    match_description,
    questions_from_gt,
)
from .export import Dialect, ExportScript, export_inkscape_script, export_office_script
from .llm import (
    AuditorFeedback,
    CompletionClient,
    GenerationFailedError,
    HttpCompletionClient,
    InContextExample,
    NoPlanFoundError,
    ScriptedClient,
    TranscriptRecorder,
    TranscriptReplayClient,
    build_auditor_prompt,
    build_planner_prompt,
    parse_auditor_completion,
    parse_plan_completion,
)
from .loop import (
    AuditorMode,
    LoopConfig,
    LoopTrace,
    RefinerMode,
    Termination,
    generate_initial_plan,
    refine_loop,
)
from .model import (
    DiagramPlan,
    Entity,
    EntityKind,
    GridBox,
    PixelRect,
    RelationKind,
    Relationship,
    SpatialRelation,
    StructuralViolation,
    anchor_pair,
    iou,
    is_between,
    plan_from_dict,
    plan_to_dict,
    spatial_relation,
    to_pixels,
    validate_structure,
)
from .render import RenderOptions, RenderStyle, SvgDocument, fit_text, render_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
