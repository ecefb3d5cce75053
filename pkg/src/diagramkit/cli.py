"""Command-line entry points for the whole pipeline.

Exit codes: 0 on success, 1 on a domain error (bad plan, failed generation,
unreadable input), 2 on usage errors. With --json, domain errors are also
printed as structured JSON on stderr.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import dataset as datasetmod
from .audit import AuditConfig, audit_plan
from .dsl import PlanTextError, parse_plan, serialize_plan
from .evalsuite import Skill, evaluate, questions_from_gt
from .export import Dialect, export_inkscape_script, export_office_script
from .icons import IconProvider
from .llm import (
    CompletionError,
    GenerationFailedError,
    HttpCompletionClient,
    TranscriptRecorder,
    TranscriptReplayClient,
)
from .loop import AuditorMode, LoopConfig, RefinerMode, generate_initial_plan, refine_loop
from .model import plan_from_dict, plan_to_dict, validate_structure
from .render import RenderOptions, RenderStyle, render_svg

DOMAIN_ERRORS = (
    PlanTextError,
    GenerationFailedError,
    CompletionError,
    ValueError,
    OSError,
)


def _fail(message: str, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps({"error": message}), err=True)
    else:
        click.echo(f"error: {message}", err=True)
    sys.exit(1)


def domain_errors(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        as_json = bool(kwargs.get("as_json"))
        try:
            return command(*args, **kwargs)
        except DOMAIN_ERRORS as exc:
            _fail(str(exc), as_json)

    return wrapper


def _load_plan(path: str, caption: str = ""):
    """Read a plan from canonical JSON or DSL text, sniffing the format."""
    text = Path(path).read_text("utf-8")
    if text.lstrip().startswith("{"):
        plan = plan_from_dict(json.loads(text))
        return plan
    return parse_plan(text, caption)


def _make_client(replay: str | None, record: str | None):
    if replay:
        client = TranscriptReplayClient(replay)
    else:
        client = HttpCompletionClient.from_env()
        if client is None:
            raise CompletionError(
                "no completion client: set DIAGRAM_LLM_ENDPOINT or pass --replay TRANSCRIPT"
            )
    if record:
        client = TranscriptRecorder(client, record)
    return client


def _load_examples(path: str | None, n: int, topic: str):
    if not path:
        return ()
    pool = datasetmod.train_records(datasetmod.load_records(path).records)
    count = min(n, len(pool))
    return tuple(datasetmod.select_examples(pool, count, topic or None))


def _write_or_echo(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, "utf-8")
    else:
        click.echo(text, nl=not text.endswith("\n"))


@click.group()
def main() -> None:
    """Diagram planning toolkit: parse, audit, refine, render, export, eval."""


@main.command()
@click.argument("input_path")
@click.option("--caption", default="", help="Caption to attach (the DSL text carries none).")
@click.option("--out", default=None, help="Write JSON here instead of stdout.")
@click.option("--json", "as_json", is_flag=True, help="Structured errors on stderr.")
@domain_errors
def parse(input_path: str, caption: str, out: str | None, as_json: bool) -> None:
    """Parse DSL plan text into canonical plan JSON."""
    warnings: list[str] = []
    plan = parse_plan(Path(input_path).read_text("utf-8"), caption, warnings)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    _write_or_echo(json.dumps(plan_to_dict(plan), indent=2) + "\n", out)


@main.command()
@click.argument("input_path")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def validate(input_path: str, as_json: bool) -> None:
    """Check plan structure; exits 1 and lists violations if invalid."""
    try:
        plan = _load_plan(input_path)
    except PlanTextError as exc:
        _fail(str(exc), as_json)
        return
    violations = validate_structure(plan)
    if not violations:
        click.echo("valid")
        return
    if as_json:
        click.echo(
            json.dumps(
                [
                    {"rule": v.rule.value, "subjects": list(v.subjects), "message": v.message}
                    for v in violations
                ]
            ),
            err=True,
        )
    else:
        for violation in violations:
            click.echo(f"violation: {violation.message}", err=True)
    sys.exit(1)


@main.command()
@click.argument("input_path")
@click.option("--overlap-threshold", default=0.05, show_default=True)
@click.option("--term", "terms", multiple=True, help="Required caption term (repeatable).")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def audit(input_path: str, overlap_threshold: float, terms: tuple[str, ...], as_json: bool) -> None:
    """Run the rule auditor and print its report."""
    plan = _load_plan(input_path)
    config = AuditConfig(overlap_iou_threshold=overlap_threshold, required_terms=terms)
    report = audit_plan(plan, config)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(f"verdict: {report.verdict.value}")
        for issue in report.issues:
            click.echo(f"- [{issue.kind.value}] {issue.message}")


@main.command()
@click.argument("caption")
@click.option("--topic", default="", show_default=True)
@click.option("--dataset", "dataset_path", required=True, help="Dataset JSON with the example pool.")
@click.option("--n-examples", default=10, show_default=True)
@click.option("--replay", default=None, help="Replay a recorded transcript instead of calling an API.")
@click.option("--record", default=None, help="Record the exchange to this transcript file.")
@click.option("--out", default=None)
@click.option("--dsl", "as_dsl", is_flag=True, help="Emit DSL text instead of JSON.")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def plan(
    caption: str,
    topic: str,
    dataset_path: str,
    n_examples: int,
    replay: str | None,
    record: str | None,
    out: str | None,
    as_dsl: bool,
    as_json: bool,
) -> None:
    """Generate a diagram plan for CAPTION with the planner LLM."""
    examples = _load_examples(dataset_path, n_examples, topic)
    if not examples:
        _fail("the dataset supplies no usable in-context examples", as_json)
    client = _make_client(replay, record)
    generated = generate_initial_plan(caption, topic, client, examples)
    if as_dsl:
        _write_or_echo(serialize_plan(generated), out)
    else:
        _write_or_echo(json.dumps(plan_to_dict(generated), indent=2) + "\n", out)


@main.command()
@click.argument("input_path")
@click.option("--caption", default=None, help="Defaults to the plan's stored caption.")
@click.option("--auditor", type=click.Choice([m.value for m in AuditorMode]), default="rules", show_default=True)
@click.option("--refiner", type=click.Choice([m.value for m in RefinerMode]), default="rules", show_default=True)
@click.option("--max-iterations", default=4, show_default=True)
@click.option("--dataset", "dataset_path", default=None, help="Example pool for LLM modes.")
@click.option("--topic", default="")
@click.option("--n-examples", default=10, show_default=True)
@click.option("--replay", default=None)
@click.option("--record", default=None)
@click.option("--out", default=None)
@click.option("--trace-out", default=None, help="Write the loop trace JSON here.")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def refine(
    input_path: str,
    caption: str | None,
    auditor: str,
    refiner: str,
    max_iterations: int,
    dataset_path: str | None,
    topic: str,
    n_examples: int,
    replay: str | None,
    record: str | None,
    out: str | None,
    trace_out: str | None,
    as_json: bool,
) -> None:
    """Run the planner-auditor refinement loop on a plan."""
    loaded = _load_plan(input_path)
    config = LoopConfig(
        max_iterations=max_iterations,
        auditor_mode=AuditorMode(auditor),
        refiner_mode=RefinerMode(refiner),
        examples=_load_examples(dataset_path, n_examples, topic),
        topic=topic,
    )
    client = _make_client(replay, record) if config.needs_client else None
    refined, trace = refine_loop(loaded, caption if caption is not None else loaded.caption, config, client)
    if trace_out:
        Path(trace_out).write_text(json.dumps(trace.to_dict(), indent=2) + "\n", "utf-8")
    click.echo(
        f"termination: {trace.termination.value} after {trace.revisions} revision(s)",
        err=True,
    )
    _write_or_echo(json.dumps(plan_to_dict(refined), indent=2) + "\n", out)


@main.command()
@click.argument("input_path")
@click.option("--out", required=True)
@click.option("--canvas", default=512.0, show_default=True)
@click.option("--style", type=click.Choice([s.value for s in RenderStyle]), default="placeholder", show_default=True)
@click.option("--icon-cache", default=None, help="Icon cache directory (icons style).")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def render(
    input_path: str,
    out: str,
    canvas: float,
    style: str,
    icon_cache: str | None,
    as_json: bool,
) -> None:
    """Render a plan to an SVG file."""
    plan_value = _load_plan(input_path)
    options = RenderOptions(canvas_side=canvas, style=RenderStyle(style))
    icons = IconProvider.default(icon_cache) if options.style is RenderStyle.ICONS else None
    document = render_svg(plan_value, options, icons)
    for warning in document.warnings:
        click.echo(f"warning: {warning}", err=True)
    Path(out).write_text(document.text, "utf-8")
    click.echo(f"wrote {out}")


@main.command()
@click.argument("input_path")
@click.option("--dialect", type=click.Choice([d.value for d in Dialect]), required=True)
@click.option("--out", required=True)
@click.option("--canvas", default=None, type=float, help="Canvas side; defaults per dialect.")
@click.option("--style", type=click.Choice([s.value for s in RenderStyle]), default="placeholder", show_default=True)
@click.option("--icon-cache", default=None)
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def export(
    input_path: str,
    dialect: str,
    out: str,
    canvas: float | None,
    style: str,
    icon_cache: str | None,
    as_json: bool,
) -> None:
    """Generate an editable-platform script from a plan."""
    plan_value = _load_plan(input_path)
    icons = IconProvider.default(icon_cache) if RenderStyle(style) is RenderStyle.ICONS else None
    options = None
    if canvas is not None:
        options = RenderOptions(canvas_side=canvas, style=RenderStyle(style))
    elif RenderStyle(style) is RenderStyle.ICONS:
        options = RenderOptions(style=RenderStyle.ICONS)
    if Dialect(dialect) is Dialect.OFFICE_AUTOMATION:
        script = export_office_script(plan_value, options, icons)
    else:
        script = export_inkscape_script(plan_value, options, icons)
    Path(out).write_text(script.text, "utf-8")
    if script.assets:
        manifest = Path(out).with_suffix(".assets.json")
        manifest.write_text(json.dumps(script.assets, indent=2) + "\n", "utf-8")
        click.echo(f"wrote {out} and {manifest}")
    else:
        click.echo(f"wrote {out}")


@main.command(name="eval")
@click.argument("candidate_path")
@click.argument("gt_path")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def eval_command(candidate_path: str, gt_path: str, as_json: bool) -> None:
    """Score a candidate plan against a ground-truth plan."""
    candidate = _load_plan(candidate_path)
    gt = _load_plan(gt_path)
    report = evaluate(candidate, questions_from_gt(gt))
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
        return

    def cell(value: float | None) -> str:
        return "-" if value is None else f"{value:.1f}"

    columns = ["Object", "Count", "Text", "Relationships", "Overall"]
    values = [
        cell(report.skill_accuracy(Skill.OBJECT)),
        cell(report.skill_accuracy(Skill.COUNT)),
        cell(report.skill_accuracy(Skill.TEXT)),
        cell(report.skill_accuracy(Skill.RELATIONSHIP)),
        cell(report.overall),
    ]
    width = max(len(c) for c in columns) + 2
    click.echo("".join(c.ljust(width) for c in columns))
    click.echo("".join(v.ljust(width) for v in values))


@main.command()
@click.argument("dataset_path")
@click.option("--out-dir", default=None, help="Write one plan JSON per record here.")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def ingest(dataset_path: str, out_dir: str | None, as_json: bool) -> None:
    """Load a dataset file and convert its records to plans."""
    loaded = datasetmod.load_records(dataset_path)
    for warning in loaded.warnings:
        click.echo(f"warning: {warning}", err=True)
    if out_dir:
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        for record in loaded.records:
            plan_value = datasetmod.record_to_plan(record)
            path = target / f"{record.record_id}.json"
            path.write_text(json.dumps(plan_to_dict(plan_value), indent=2) + "\n", "utf-8")
    click.echo(f"loaded {len(loaded)} record(s), skipped {loaded.skipped}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8700, show_default=True)
@click.option("--replay", "transcript", default=None, help="Transcript for offline plan generation.")
@click.option("--dataset", "dataset_path", default=None, help="Example pool for LLM calls.")
@click.option("--topic", default="")
@click.option("--n-examples", default=10, show_default=True)
@click.option("--ui", "ui_dir", default=None, help="Serve this directory as the editor UI.")
@click.option("--snapshot-dir", default=None, help="Checkpoint each session's plan to JSON files here.")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def serve(
    host: str,
    port: int,
    transcript: str | None,
    dataset_path: str | None,
    topic: str,
    n_examples: int,
    ui_dir: str | None,
    snapshot_dir: str | None,
    as_json: bool,
) -> None:
    """Start the HTTP+JSON service (and optionally the editor UI)."""
    from .service import serve as run_service

    client = None
    if transcript:
        client = TranscriptReplayClient(transcript)
    else:
        client = HttpCompletionClient.from_env()
    run_service(
        host=host,
        port=port,
        client=client,
        examples=_load_examples(dataset_path, n_examples, topic),
        ui_dir=ui_dir,
        snapshot_dir=snapshot_dir,
    )


if __name__ == "__main__":
    main()
