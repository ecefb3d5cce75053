import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from diagramkit.audit import Verdict
from diagramkit.dsl import serialize_plan
from diagramkit.llm import (
    CompletionError,
    GenerationFailedError,
    HttpCompletionClient,
    InContextExample,
    NoPlanFoundError,
    ScriptedClient,
    TranscriptRecorder,
    TranscriptReplayClient,
    build_auditor_prompt,
    build_planner_prompt,
    build_revision_prompt,
    parse_auditor_completion,
    parse_plan_completion,
    prompt_hash,
    request_plan,
)
from conftest import BUTTERFLY_CAPTION


@pytest.fixture()
def examples(butterfly_plan):
    return [
        InContextExample(BUTTERFLY_CAPTION, "biology", butterfly_plan)
        for _ in range(3)
    ]


class TestPromptBuilders:
    def test_planner_prompt_structure(self, butterfly_plan, examples):
        prompt = build_planner_prompt("A diagram of rain", "weather", examples)
        assert prompt.count("Required Entities:") == len(examples) + 1
        assert prompt.count(serialize_plan(butterfly_plan)) == len(examples)
        assert prompt.endswith("Required Entities:")
        assert "Caption: A diagram of rain" in prompt
        assert "Topic: weather" in prompt

    def test_planner_prompt_deterministic(self, examples):
        first = build_planner_prompt("c", "t", examples)
        second = build_planner_prompt("c", "t", examples)
        assert first == second

    def test_planner_requires_examples(self):
        with pytest.raises(ValueError):
            build_planner_prompt("c", "t", [])

    def test_auditor_prompt_embeds_plan(self, butterfly_plan, examples):
        prompt = build_auditor_prompt(butterfly_plan, BUTTERFLY_CAPTION, examples)
        assert serialize_plan(butterfly_plan) in prompt
        assert f"Caption: {BUTTERFLY_CAPTION}" in prompt
        bare = build_auditor_prompt(butterfly_plan, BUTTERFLY_CAPTION)
        assert serialize_plan(butterfly_plan) in bare

    def test_revision_prompt_carries_feedback_and_plan(self, butterfly_plan, examples):
        prompt = build_revision_prompt(
            BUTTERFLY_CAPTION, "biology", examples, butterfly_plan, "make the egg bigger"
        )
        assert "make the egg bigger" in prompt
        assert serialize_plan(butterfly_plan) in prompt
        assert prompt.endswith("Required Entities:")


class TestParsePlanCompletion:
    def test_markdown_fences_and_prose(self, butterfly_text, butterfly_plan):
        completion = f"Here is the plan you asked for:\n```\n{butterfly_text}```\nHope that helps!"
        plan = parse_plan_completion(completion, BUTTERFLY_CAPTION)
        assert plan == butterfly_plan

    def test_pure_dsl_text(self, butterfly_text, butterfly_plan):
        assert parse_plan_completion(butterfly_text, BUTTERFLY_CAPTION) == butterfly_plan

    def test_no_header(self):
        with pytest.raises(NoPlanFoundError):
            parse_plan_completion("I could not produce a plan, sorry.")

    def test_round_trips_serializer_output(self, butterfly_plan):
        assert parse_plan_completion(serialize_plan(butterfly_plan), BUTTERFLY_CAPTION) == butterfly_plan


class TestParseAuditorCompletion:
    def test_approval_marker(self):
        feedback = parse_auditor_completion("NO ISSUES")
        assert feedback.verdict is Verdict.APPROVED and feedback.feedback_text == ""

    def test_marker_with_noise_tolerated(self):
        assert parse_auditor_completion("\n  no issues.\n").approved

    def test_revision_feedback(self):
        text = "The sun should be larger than the earths and moved to the left."
        feedback = parse_auditor_completion(text)
        assert feedback.verdict is Verdict.NEEDS_REVISION
        assert feedback.feedback_text == text

    def test_empty_text_is_conservative(self):
        feedback = parse_auditor_completion("")
        assert feedback.verdict is Verdict.NEEDS_REVISION
        assert feedback.feedback_text == ""

    def test_custom_marker(self):
        assert parse_auditor_completion("LGTM", approval_marker="LGTM").approved


class TestRequestPlan:
    def test_retry_recovers_once(self, butterfly_text):
        client = ScriptedClient(["garbled nonsense", butterfly_text])
        plan = request_plan(client, "prompt", BUTTERFLY_CAPTION)
        assert len(plan.entities) == 8
        assert len(client.prompts) == 2
        assert client.prompts[1].startswith("prompt")
        assert "Emit only the diagram plan" in client.prompts[1]

    def test_two_failures_raise(self):
        client = ScriptedClient(["garbage one", "garbage two"])
        with pytest.raises(GenerationFailedError):
            request_plan(client, "prompt")


class TestTranscripts:
    def test_record_then_replay(self, tmp_path, butterfly_text):
        path = tmp_path / "transcript.jsonl"
        recorder = TranscriptRecorder(ScriptedClient([butterfly_text]), path)
        first = recorder.complete("the prompt")
        replay = TranscriptReplayClient(path)
        assert replay.complete("the prompt") == first
        with pytest.raises(CompletionError):
            replay.complete("a different prompt")

    def test_replay_consumes_duplicates_in_order(self, tmp_path):
        path = tmp_path / "transcript.jsonl"
        digest = prompt_hash("p")
        lines = [
            json.dumps({"prompt_hash": digest, "completion": "first"}),
            json.dumps({"prompt_hash": digest, "completion": "second"}),
        ]
        path.write_text("\n".join(lines) + "\n", "utf-8")
        replay = TranscriptReplayClient(path)
        assert replay.complete("p") == "first"
        assert replay.complete("p") == "second"
        assert replay.complete("p") == "second"  # last entry sticks


class _FakeOpenAI(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        reply = {
            "choices": [
                {"message": {"content": f"echo:{body['messages'][0]['content']}"}}
            ]
        }
        payload = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


class TestHttpClient:
    def test_chat_completions_round_trip(self):
        server = ThreadingHTTPServer(("127.0.0.1", 0), _FakeOpenAI)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            port = server.server_address[1]
            client = HttpCompletionClient(f"http://127.0.0.1:{port}", api_key="k")
            assert client.complete("hello") == "echo:hello"
        finally:
            server.shutdown()

    def test_from_env(self, monkeypatch):
        monkeypatch.delenv("DIAGRAM_LLM_ENDPOINT", raising=False)
        assert HttpCompletionClient.from_env() is None
        monkeypatch.setenv("DIAGRAM_LLM_ENDPOINT", "http://example.test/v1")
        monkeypatch.setenv("DIAGRAM_LLM_KEY", "secret")
        client = HttpCompletionClient.from_env()
        assert client.endpoint == "http://example.test/v1"
        assert client.api_key == "secret"
