"""Prompt construction, completion clients, and completion parsing for the
planner and auditor roles.

The preamble wording ships as editable template files next to this module;
tests pin the prompt structure, not the prose. Completion clients share one
tiny interface so the whole pipeline runs against scripted or replayed
completions in tests and offline use.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

import requests

from .audit import Verdict
from .dsl import PlanTextError, parse_plan, serialize_plan
from .model import DiagramPlan, require_valid

ENDPOINT_ENV = "DIAGRAM_LLM_ENDPOINT"
KEY_ENV = "DIAGRAM_LLM_KEY"
MODEL_ENV = "DIAGRAM_LLM_MODEL"

DEFAULT_APPROVAL_MARKER = "NO ISSUES"
PLAN_CUE = "Required Entities:"

_RETRY_INSTRUCTION = (
    "\n\nEmit only the diagram plan in the exact format of the examples,"
    " starting with \"Required Entities:\" and with no commentary."
)


def _load_template(name: str) -> str:
    return resources.files(__package__).joinpath("templates", name).read_text("utf-8")


PLANNER_PREAMBLE = _load_template("planner_preamble.txt").strip()
AUDITOR_PREAMBLE = _load_template("auditor_preamble.txt").strip()


class NoPlanFoundError(PlanTextError):
    """The completion contains no plan header at all."""


class GenerationFailedError(Exception):
    """The client produced no parseable plan, even after one retry."""


class CompletionError(Exception):
    """Transport-level failure while talking to a completion endpoint."""


@dataclass(frozen=True)
class InContextExample:
    caption: str
    topic: str
    plan: DiagramPlan

    def __post_init__(self) -> None:
        require_valid(self.plan)


@dataclass(frozen=True)
class AuditorFeedback:
    verdict: Verdict
    feedback_text: str

    @property
    def approved(self) -> bool:
        return self.verdict is Verdict.APPROVED


@runtime_checkable
class CompletionClient(Protocol):
    def complete(self, prompt: str, *, temperature: float = 0.0) -> str: ...


class ScriptedClient:
    """Replays a fixed list of completions; safe for concurrent callers."""

    def __init__(self, completions: Sequence[str]) -> None:
        self._completions = list(completions)
        self._lock = threading.Lock()
        self.prompts: list[str] = []

    def complete(self, prompt: str, *, temperature: float = 0.0) -> str:
        with self._lock:
            self.prompts.append(prompt)
            if not self._completions:
                raise CompletionError("scripted client has no completions left")
            if len(self._completions) == 1:
                return self._completions[0]
            return self._completions.pop(0)


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class TranscriptReplayClient:
    """Serves completions from a transcript file (JSON lines of
    {"prompt_hash", "completion"}); repeated prompts replay in order."""

    def __init__(self, path: str | Path) -> None:
        self._queues: dict[str, list[str]] = {}
        self._lock = threading.Lock()
        self.path = Path(path)
        for line in self.path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            self._queues.setdefault(record["prompt_hash"], []).append(record["completion"])

    def complete(self, prompt: str, *, temperature: float = 0.0) -> str:
        digest = prompt_hash(prompt)
        with self._lock:
            queue = self._queues.get(digest)
            if not queue:
                raise CompletionError(f"transcript has no completion for prompt {digest[:12]}")
            if len(queue) == 1:
                return queue[0]
            return queue.pop(0)


class TranscriptRecorder:
    """Wraps a client and appends every exchange to a transcript file."""

    def __init__(self, inner: CompletionClient, path: str | Path) -> None:
        self._inner = inner
        self._lock = threading.Lock()
        self.path = Path(path)

    def complete(self, prompt: str, *, temperature: float = 0.0) -> str:
        completion = self._inner.complete(prompt, temperature=temperature)
        record = json.dumps(
            {"prompt_hash": prompt_hash(prompt), "completion": completion}
        )
        with self._lock:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(record + "\n")
        return completion


class HttpCompletionClient:
    """OpenAI-compatible chat-completions client."""

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "gpt-4",
        timeout: float = 120.0,
    ) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.api_key = api_key
        self.model = model
        self.timeout = timeout

    @classmethod
    def from_env(cls) -> "HttpCompletionClient | None":
        endpoint = os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            return None
        return cls(
            endpoint,
            api_key=os.environ.get(KEY_ENV, ""),
            model=os.environ.get(MODEL_ENV, "gpt-4"),
        )

    def complete(self, prompt: str, *, temperature: float = 0.0) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        }
        try:
            response = requests.post(
                f"{self.endpoint}/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
            raise CompletionError(f"completion request failed: {exc}") from exc


def _example_block(example: InContextExample) -> str:
    return (
        f"Caption: {example.caption}\n"
        f"Topic: {example.topic}\n"
        f"{serialize_plan(example.plan)}"
    )


def build_planner_prompt(
    caption: str, topic: str, examples: Sequence[InContextExample]
) -> str:
    """Planner prompt: preamble, example plans, then the query ending in the
    open "Required Entities:" cue."""
    if not examples:
        raise ValueError("at least one in-context example is required")
    parts = [PLANNER_PREAMBLE, ""]
    for example in examples:
        parts.append(_example_block(example))
    parts.append(f"Caption: {caption}\nTopic: {topic}\n{PLAN_CUE}")
    return "\n".join(parts)


def build_revision_prompt(
    caption: str,
    topic: str,
    examples: Sequence[InContextExample],
    plan: DiagramPlan,
    feedback: str,
) -> str:
    """Revision prompt: the full previous plan plus the auditor feedback."""
    parts = [PLANNER_PREAMBLE, ""]
    for example in examples:
        parts.append(_example_block(example))
    parts.append(
        f"Caption: {caption}\n"
        f"Topic: {topic}\n"
        "Previous diagram plan:\n"
        f"{serialize_plan(plan)}"
        "Feedback:\n"
        f"{feedback.strip()}\n"
        "Revised diagram plan:\n"
        f"{PLAN_CUE}"
    )
    return "\n".join(parts)


def build_auditor_prompt(
    plan: DiagramPlan,
    caption: str,
    examples: Sequence[InContextExample] = (),
    topic: str = "",
) -> str:
    """Auditor prompt embedding the serialized plan, its caption, and the
    topic when one is known."""
    require_valid(plan)
    parts = [AUDITOR_PREAMBLE, ""]
    for example in examples:
        parts.append(_example_block(example))
    topic_line = f"Topic: {topic}\n" if topic else ""
    parts.append(
        f"Caption: {caption}\n"
        f"{topic_line}"
        "Diagram plan:\n"
        f"{serialize_plan(plan)}"
        "Feedback:"
    )
    return "\n".join(parts)


def parse_plan_completion(
    text: str, caption: str = "", warnings: list[str] | None = None
) -> DiagramPlan:
    """Extract and parse the plan inside a completion.

    Locates the first "Required Entities:" header (case-insensitive), drops
    markdown fences and preceding prose, and delegates to the DSL parser.
    """
    lines = [line for line in text.splitlines() if not line.strip().startswith("```")]
    stripped = "\n".join(lines)
    index = stripped.lower().find(PLAN_CUE.lower())
    if index < 0:
        raise NoPlanFoundError("completion contains no 'Required Entities:' header")
    return parse_plan(stripped[index:], caption, warnings)


def parse_auditor_completion(
    text: str, approval_marker: str = DEFAULT_APPROVAL_MARKER
) -> AuditorFeedback:
    """Approved when the first non-empty line is the approval marker;
    otherwise the whole completion becomes revision feedback."""
    for line in text.splitlines():
        candidate = line.strip().rstrip(".!:")
        if not candidate:
            continue
        if candidate.casefold() == approval_marker.casefold():
            return AuditorFeedback(Verdict.APPROVED, "")
        break
    return AuditorFeedback(Verdict.NEEDS_REVISION, text.strip())


def request_plan(
    client: CompletionClient,
    prompt: str,
    caption: str = "",
    *,
    temperature: float = 0.0,
) -> DiagramPlan:
    """Ask the client for a plan, retrying once with an explicit
    format reminder before giving up."""
    try:
        return parse_plan_completion(
            client.complete(prompt, temperature=temperature), caption
        )
    except PlanTextError:
        pass
    try:
        return parse_plan_completion(
            client.complete(prompt + _RETRY_INSTRUCTION, temperature=temperature),
            caption,
        )
    except PlanTextError as exc:
        raise GenerationFailedError(f"no parseable plan after one retry: {exc}") from exc
