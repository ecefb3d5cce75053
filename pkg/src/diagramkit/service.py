"""HTTP+JSON service backing the plan editor UI.

Sessions are held in memory, one lock and one version counter each; a PUT
carrying a stale version is rejected with 409 rather than silently merged,
and nothing structurally invalid is ever stored. Refinement over HTTP runs
one loop iteration per call so a UI can show every round.
"""
from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Response

from .audit import AuditConfig, audit_plan
from .dsl import PlanTextError, parse_plan
from .export import Dialect, export_inkscape_script, export_office_script
from .llm import CompletionClient, GenerationFailedError, InContextExample
from .loop import (
    AuditorMode,
    LoopConfig,
    LoopStep,
    RefinerMode,
    Termination,
    generate_initial_plan,
    refine_loop,
)
from .model import DiagramPlan, plan_from_dict, plan_to_dict, validate_structure
from .render import IconSource, RenderOptions, RenderStyle, render_svg


@dataclass
class Session:
    session_id: str
    caption: str
    topic: str
    plan: DiagramPlan
    version: int = 1
    steps: list[LoopStep] = field(default_factory=list)
    last_termination: Termination | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory sessions, optionally checkpointed to one JSON file each."""

    def __init__(self, snapshot_dir: str | Path | None = None) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        if self.snapshot_dir:
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)

    def create(self, caption: str, topic: str, plan: DiagramPlan) -> Session:
        session = Session(uuid.uuid4().hex[:12], caption, topic, plan)
        with self._lock:
            self._sessions[session.session_id] = session
        self.snapshot(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    def snapshot(self, session: Session) -> None:
        """Write the session's current plan to disk (caller holds its lock)."""
        if self.snapshot_dir is None:
            return
        payload = {
            "session_id": session.session_id,
            "caption": session.caption,
            "topic": session.topic,
            "version": session.version,
            "plan": plan_to_dict(session.plan),
        }
        path = self.snapshot_dir / f"{session.session_id}.json"
        path.write_text(json.dumps(payload, indent=2) + "\n", "utf-8")


def _checked_plan(payload) -> DiagramPlan:
    """Parse and structurally validate a plan body or raise 400."""
    try:
        plan = plan_from_dict(payload)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail={"error": str(exc), "violations": []})
    violations = validate_structure(plan)
    if violations:
        raise HTTPException(
            status_code=400,
            detail={
                "error": "structurally invalid plan",
                "violations": [
                    {"rule": v.rule.value, "subjects": list(v.subjects), "message": v.message}
                    for v in violations
                ],
            },
        )
    return plan


def create_app(
    client: CompletionClient | None = None,
    examples: tuple[InContextExample, ...] = (),
    audit_config: AuditConfig | None = None,
    icons: IconSource | None = None,
    ui_dir: str | None = None,
    snapshot_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="diagramkit service")
    store = SessionStore(snapshot_dir)
    audit_cfg = audit_config or AuditConfig()
    app.state.store = store

    @app.post("/session")
    def create_session(payload: dict = Body(...)):
        caption = payload.get("caption", "")
        topic = payload.get("topic", "")
        if "plan" in payload:
            plan = _checked_plan(payload["plan"])
            caption = caption or plan.caption
        elif "dsl" in payload:
            try:
                plan = parse_plan(payload["dsl"], caption)
            except PlanTextError as exc:
                raise HTTPException(status_code=400, detail={"error": str(exc)})
        elif caption:
            if client is None:
                raise HTTPException(
                    status_code=400,
                    detail={"error": "no planner client configured; supply a plan or dsl body"},
                )
            try:
                plan = generate_initial_plan(caption, topic, client, examples)
            except GenerationFailedError as exc:
                raise HTTPException(status_code=502, detail={"error": str(exc)})
        else:
            raise HTTPException(status_code=400, detail={"error": "caption, plan, or dsl required"})
        session = store.create(caption, topic, plan)
        return {
            "session_id": session.session_id,
            "version": session.version,
            "plan": plan_to_dict(session.plan),
        }

    @app.get("/session/{session_id}/plan")
    def get_plan(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "plan": plan_to_dict(session.plan),
                "version": session.version,
                "caption": session.caption,
            }

    @app.put("/session/{session_id}/plan")
    def put_plan(session_id: str, payload: dict = Body(...)):
        session = store.get(session_id)
        plan = _checked_plan(payload.get("plan"))
        version = payload.get("version")
        with session.lock:
            if version != session.version:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "error": "version conflict",
                        "current_version": session.version,
                    },
                )
            session.plan = plan
            session.version += 1
            store.snapshot(session)
            return {"version": session.version, "plan": plan_to_dict(session.plan)}

    @app.post("/session/{session_id}/audit")
    def audit_session(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return audit_plan(session.plan, audit_cfg).to_dict()

    @app.post("/session/{session_id}/refine")
    def refine_session(session_id: str, payload: dict = Body(default={})):
        session = store.get(session_id)
        try:
            config = LoopConfig(
                max_iterations=1,
                auditor_mode=AuditorMode(payload.get("auditor_mode", "rules")),
                refiner_mode=RefinerMode(payload.get("refiner_mode", "rules")),
                audit=audit_cfg,
                examples=examples,
                topic=session.topic,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)})
        if config.needs_client and client is None:
            raise HTTPException(status_code=400, detail={"error": "no completion client configured"})
        with session.lock:
            refined, trace = refine_loop(session.plan, session.caption, config, client)
            session.steps.extend(trace.steps)
            session.last_termination = trace.termination
            if refined is not session.plan:
                session.plan = refined
                session.version += 1
                store.snapshot(session)
            return {
                "plan": plan_to_dict(session.plan),
                "version": session.version,
                "termination": trace.termination.value,
                "steps": [step.to_dict() for step in trace.steps],
            }

    @app.get("/session/{session_id}/render.svg")
    def render_session(session_id: str, canvas: float = 512.0, style: str = "placeholder"):
        session = store.get(session_id)
        try:
            options = RenderOptions(canvas_side=canvas, style=RenderStyle(style))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)})
        with session.lock:
            document = render_svg(session.plan, options, icons)
        return Response(content=document.text, media_type="image/svg+xml")

    @app.post("/session/{session_id}/export")
    def export_session(session_id: str, payload: dict = Body(...)):
        session = store.get(session_id)
        try:
            dialect = Dialect(payload.get("dialect", ""))
        except ValueError:
            raise HTTPException(
                status_code=400,
                detail={"error": "dialect must be 'office' or 'inkscape'"},
            )
        with session.lock:
            if dialect is Dialect.OFFICE_AUTOMATION:
                script = export_office_script(session.plan, icons=icons)
            else:
                script = export_inkscape_script(session.plan, icons=icons)
        return script.to_dict()

    @app.get("/session/{session_id}/trace")
    def get_trace(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return {
                "steps": [step.to_dict() for step in session.steps],
                "final_plan": plan_to_dict(session.plan),
                "termination": session.last_termination.value
                if session.last_termination
                else None,
            }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8700,
    **app_kwargs,
) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(**app_kwargs), host=host, port=port)
