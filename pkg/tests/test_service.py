import pytest
from fastapi.testclient import TestClient

from diagramkit.llm import InContextExample, ScriptedClient
from diagramkit.model import plan_to_dict
from diagramkit.service import create_app
from conftest import BUTTERFLY_CAPTION


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def session(client, butterfly_plan):
    response = client.post("/session", json={"plan": plan_to_dict(butterfly_plan)})
    assert response.status_code == 200
    return response.json()


class TestSessionLifecycle:
    def test_create_from_plan_json(self, session):
        assert session["version"] == 1
        assert len(session["plan"]["entities"]) == 8

    def test_create_from_dsl(self, client, butterfly_text):
        response = client.post(
            "/session", json={"dsl": butterfly_text, "caption": BUTTERFLY_CAPTION}
        )
        assert response.status_code == 200
        assert response.json()["plan"]["caption"] == BUTTERFLY_CAPTION

    def test_get_plan(self, client, session):
        sid = session["session_id"]
        response = client.get(f"/session/{sid}/plan")
        assert response.status_code == 200
        assert response.json()["version"] == 1

    def test_unknown_session_is_404(self, client):
        assert client.get("/session/nope/plan").status_code == 404
        assert client.post("/session/nope/audit").status_code == 404

    def test_caption_generation_with_client(self, butterfly_text, butterfly_plan):
        scripted = ScriptedClient([butterfly_text])
        examples = (InContextExample(BUTTERFLY_CAPTION, "biology", butterfly_plan),)
        app = create_app(client=scripted, examples=examples)
        response = TestClient(app).post(
            "/session", json={"caption": BUTTERFLY_CAPTION, "topic": "biology"}
        )
        assert response.status_code == 200
        assert len(response.json()["plan"]["entities"]) == 8

    def test_caption_without_client_is_400(self, client):
        assert client.post("/session", json={"caption": "a diagram"}).status_code == 400


class TestPutPlan:
    def test_put_moves_box_and_bumps_version(self, client, session):
        sid = session["session_id"]
        plan = session["plan"]
        plan["layouts"]["I0"] = [10, 50, 14, 14]
        response = client.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        assert response.status_code == 200
        body = response.json()
        assert body["version"] == 2
        assert body["plan"]["layouts"]["I0"] == [10, 50, 14, 14]

    def test_stale_version_rejected(self, client, session):
        sid = session["session_id"]
        plan = session["plan"]
        first = client.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        assert first.status_code == 200
        stale = client.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        assert stale.status_code == 409
        assert stale.json()["detail"]["current_version"] == 2

    def test_invalid_plan_rejected_with_violations(self, client, session):
        sid = session["session_id"]
        plan = session["plan"]
        del plan["layouts"]["I0"]
        response = client.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        assert response.status_code == 400
        violations = response.json()["detail"]["violations"]
        assert any(v["rule"] == "missing_layout" for v in violations)
        # and the stored plan is untouched
        assert client.get(f"/session/{sid}/plan").json()["version"] == 1


class TestPipelineEndpoints:
    def test_audit_endpoint(self, client, session):
        sid = session["session_id"]
        response = client.post(f"/session/{sid}/audit")
        assert response.status_code == 200
        assert response.json()["verdict"] == "approved"

    def test_refine_clamps_out_of_bounds(self, client, session):
        sid = session["session_id"]
        plan = session["plan"]
        plan["layouts"]["I0"] = [95, 95, 14, 14]
        client.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        response = client.post(f"/session/{sid}/refine", json={})
        assert response.status_code == 200
        body = response.json()
        assert body["plan"]["layouts"]["I0"] == [86, 86, 14, 14]
        assert body["version"] == 3

    def test_render_reflects_updated_plan(self, client, session):
        sid = session["session_id"]
        before = client.get(f"/session/{sid}/render.svg")
        assert before.status_code == 200
        assert before.headers["content-type"].startswith("image/svg+xml")
        plan = session["plan"]
        plan["layouts"]["I0"] = [0, 0, 20, 20]
        client.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        after = client.get(f"/session/{sid}/render.svg")
        assert before.text != after.text
        assert 'x="0"' in after.text

    def test_export_endpoint(self, client, session):
        sid = session["session_id"]
        response = client.post(f"/session/{sid}/export", json={"dialect": "office"})
        assert response.status_code == 200
        assert "AddConnector" in response.json()["text"]
        bad = client.post(f"/session/{sid}/export", json={"dialect": "powerpoint"})
        assert bad.status_code == 400

    def test_trace_accumulates_refine_steps(self, client, session):
        sid = session["session_id"]
        assert client.get(f"/session/{sid}/trace").json()["steps"] == []
        client.post(f"/session/{sid}/refine", json={})
        trace = client.get(f"/session/{sid}/trace").json()
        assert len(trace["steps"]) == 1
        assert trace["termination"] == "approved"


class TestSnapshots:
    def test_sessions_checkpoint_to_json_files(self, tmp_path, butterfly_plan):
        import json

        app = create_app(snapshot_dir=tmp_path / "snaps")
        http = TestClient(app)
        created = http.post("/session", json={"plan": plan_to_dict(butterfly_plan)}).json()
        sid = created["session_id"]
        snapshot = tmp_path / "snaps" / f"{sid}.json"
        assert json.loads(snapshot.read_text())["version"] == 1
        plan = created["plan"]
        plan["layouts"]["I0"] = [10, 50, 14, 14]
        http.put(f"/session/{sid}/plan", json={"plan": plan, "version": 1})
        data = json.loads(snapshot.read_text())
        assert data["version"] == 2
        assert data["plan"]["layouts"]["I0"] == [10, 50, 14, 14]
