from __future__ import annotations

import json
import threading
import urllib.request

import pytest

from fria.clock import LogicalClock
from fria.service import Service, serve
from fria.store import MemoryStore
from fria.workflow import AssessmentWorkflow

from wsgi_client import Client

ACTOR = {"name": "Alex Kim", "role": "governance_lead", "contact": ""}

PROFILE_SET = {
    "system_name": "Automated Triage Service",
    "purpose": "Facilitate triage.",
    "operational_context": "Hospital intake.",
    "lifecycle_stage": "Implementation",
    "domain_flags": ["health", "critical_decision"],
    "system_types": ["chatbot", "decision_support"],
    "stewardship": {
        "owner": {"name": "Jonas Weber", "role": "data_protection_officer"},
        "review_interval_days": 90,
        "last_reviewed": "2024-12-15T09:00:00Z",
    },
}


@pytest.fixture()
def client(triage_catalog):
    workflow = AssessmentWorkflow(triage_catalog, MemoryStore(), LogicalClock())
    return Client(Service(workflow))


def create(client, assessment_id="t1") -> int:
    response = client.post("/assessments", {"assessment_id": assessment_id, "actor": ACTOR})
    assert response.status == 201
    return response.json()["revision"]


def to_phase1(client, assessment_id="t1") -> int:
    rev = create(client, assessment_id)
    response = client.patch(
        f"/assessments/{assessment_id}/profile",
        {"set": PROFILE_SET, "actor": ACTOR, "expected_revision": rev},
    )
    rev = response.json()["revision"]
    response = client.post(
        f"/assessments/{assessment_id}/phase0/complete",
        {"actor": ACTOR, "expected_revision": rev},
    )
    assert response.status == 200
    return response.json()["revision"]


def answer_all(client, rev, assessment_id="t1") -> int:
    values = {
        "dg_q_minimization": ("Adequate", ""),
        "dg_q_external_sources": ("Adequate", ""),
        "ho_q_review_mechanism": ("Inadequate", "no formalized review"),
        "fa_q_demographic_bias": ("Inadequate", ""),
        "fa_q_accessibility": ("Partial", ""),
    }
    for qid, (value, note) in values.items():
        response = client.put(
            f"/assessments/{assessment_id}/answers/{qid}",
            {
                "value": value,
                "note": note,
                "respondent": ACTOR,
                "expected_revision": rev,
            },
        )
        assert response.status == 200, response.body
        rev = response.json()["revision"]
    return rev


def test_unknown_route_404(client):
    assert client.get("/nope").status == 404


def test_wrong_method_405(client):
    assert client.request("DELETE", "/assessments").status == 405


def test_create_and_list(client):
    create(client, "t1")
    response = client.get("/assessments")
    assert response.status == 200
    listed = response.json()["assessments"]
    assert [a["assessment_id"] for a in listed] == ["t1"]


def test_get_profile_tracks_missing_fields(client):
    create(client)
    response = client.get("/assessments/t1/profile")
    assert response.status == 200
    assert response.json()["missing_fields"] == [
        "system_name",
        "purpose",
        "lifecycle_stage",
        "stewardship",
    ]


def test_phase0_gate_blocks_incomplete_profile(client):
    rev = create(client)
    response = client.post(
        "/assessments/t1/phase0/complete", {"actor": ACTOR, "expected_revision": rev}
    )
    assert response.status == 409
    assert response.json()["error"] == "IncompleteProfile"


def test_filtered_questions_visible_after_phase0(client):
    to_phase1(client)
    response = client.get("/assessments/t1/questions")
    ids = [q["id"] for q in response.json()["questions"]]
    assert "dg_q_genai_provenance" not in ids
    assert "ho_q_use_monitoring" not in ids
    assert len(ids) == 5


def test_stale_revision_write_conflicts(client):
    rev = to_phase1(client)
    body = {
        "value": "Adequate",
        "note": "",
        "respondent": ACTOR,
        "expected_revision": rev - 1,
    }
    response = client.put("/assessments/t1/answers/dg_q_minimization", body)
    assert response.status == 409
    payload = response.json()
    assert payload["error"] == "RevisionConflict"
    assert payload["actual"] == rev


def test_answer_validation_maps_to_422(client):
    rev = to_phase1(client)
    response = client.put(
        "/assessments/t1/answers/dg_q_genai_provenance",
        {"value": "Adequate", "note": "", "respondent": ACTOR, "expected_revision": rev},
    )
    assert response.status == 422
    assert response.json()["error"] == "QuestionNotApplicable"
    response = client.put(
        "/assessments/t1/answers/dg_q_minimization",
        {"value": "NotApplicable", "note": "", "respondent": ACTOR, "expected_revision": rev},
    )
    assert response.status == 422
    assert response.json()["error"] == "MissingJustification"


def test_phase1_gate_409_with_missing_items(client):
    rev = to_phase1(client)
    response = client.post(
        "/assessments/t1/phase1/complete", {"actor": ACTOR, "expected_revision": rev}
    )
    assert response.status == 409
    payload = response.json()
    assert payload["error"] == "IncompletePhase"
    assert "ho_q_review_mechanism" in payload["missing"]


def test_full_session_through_api(client):
    rev = to_phase1(client)
    rev = answer_all(client, rev)
    response = client.post(
        "/assessments/t1/phase1/complete", {"actor": ACTOR, "expected_revision": rev}
    )
    assert response.status == 200
    gate = response.json()["gate"]
    assert set(gate["advancing"]) == {"fa_equal_treatment", "ho_meaningful_control"}
    rev = response.json()["revision"]

    scenarios = client.get("/assessments/t1/scenarios").json()["scenarios"]
    assert [s["id"] for s in scenarios] == [
        "fa_s_underrepresentation",
        "ho_s_automation_bias",
    ]

    response = client.put(
        "/assessments/t1/evaluations/ho_s_automation_bias",
        {
            "dimensions": {"individuals": 2, "society": 2, "mitigation_effort": 1, "duration": 2},
            "control": {
                "effectiveness": "PartiallyEffective",
                "evidence_refs": ["override-protocol"],
                "control_owner": ACTOR,
            },
            "rationale": "protocols adopted",
            "actor": ACTOR,
            "expected_revision": rev,
        },
    )
    assert response.status == 200
    assert response.json()["classification"] == "PartiallyRelevant"
    rev = response.json()["revision"]

    response = client.put(
        "/assessments/t1/evaluations/fa_s_underrepresentation",
        {
            "dimensions": {"individuals": 2, "society": 2, "mitigation_effort": 2, "duration": 2},
            "control": {"effectiveness": "Ineffective", "control_owner": ACTOR},
            "rationale": "static rules exclude demographics",
            "actor": ACTOR,
            "expected_revision": rev,
        },
    )
    assert response.json()["classification"] == "Relevant"
    assert response.json()["significant"] is True
    rev = response.json()["revision"]

    response = client.post(
        "/assessments/t1/actions",
        {
            "scenario_id": "fa_s_underrepresentation",
            "action_type": "Monitoring",
            "description": "periodic bias assessments",
            "owner": ACTOR,
            "actor": ACTOR,
            "expected_revision": rev,
        },
    )
    assert response.status == 200
    assert response.json()["action_id"] == "act-0001"
    rev = response.json()["revision"]

    response = client.post(
        "/assessments/t1/phase2/complete", {"actor": ACTOR, "expected_revision": rev}
    )
    assert response.status == 200
    assert response.json()["finalizations"] == {
        "fa_equal_treatment": "Relevant",
        "ho_meaningful_control": "PartiallyRelevant",
    }

    report = client.get("/assessments/t1/report?format=canonical-structured")
    assert report.status == 200
    parsed = json.loads(report.body.decode("utf-8"))
    assert parsed["status"] == "Final"

    text = client.get("/assessments/t1/report?format=text-summary")
    assert text.headers["Content-Type"].startswith("text/plain")

    csv_response = client.get("/assessments/t1/report?format=csv-bundle&table=phase2")
    assert csv_response.headers["Content-Type"].startswith("text/csv")
    assert len(csv_response.body.decode("utf-8").splitlines()) == 3

    missing_table = client.get("/assessments/t1/report?format=csv-bundle")
    assert missing_table.status == 422


def test_action_for_ineligible_scenario_422(client):
    rev = to_phase1(client)
    rev = answer_all(client, rev)
    rev = client.post(
        "/assessments/t1/phase1/complete", {"actor": ACTOR, "expected_revision": rev}
    ).json()["revision"]
    response = client.post(
        "/assessments/t1/actions",
        {
            "scenario_id": "fa_s_underrepresentation",  # not yet evaluated
            "action_type": "Monitoring",
            "description": "x",
            "owner": ACTOR,
            "actor": ACTOR,
            "expected_revision": rev,
        },
    )
    assert response.status == 422
    assert response.json()["error"] == "ScenarioNotEligible"


def test_audit_endpoint_lists_gapless_events(client):
    rev = to_phase1(client)
    events = client.get("/assessments/t1/audit").json()["events"]
    assert [e["seq"] for e in events] == [1, 2, 3]
    assert [e["kind"] for e in events] == [
        "assessment_created",
        "profile_updated",
        "phase0_completed",
    ]
    assert client.get("/assessments/ghost/audit").status == 404


def test_report_before_output_is_409(client):
    to_phase1(client)
    response = client.get("/assessments/t1/report")
    assert response.status == 409
    assert response.json()["error"] == "PhaseIncomplete"


def test_retry_with_same_expected_revision_applies_once(client):
    rev = to_phase1(client)
    body = {
        "value": "Adequate",
        "note": "",
        "respondent": ACTOR,
        "expected_revision": rev,
    }
    first = client.put("/assessments/t1/answers/dg_q_minimization", body)
    assert first.status == 200
    retry = client.put("/assessments/t1/answers/dg_q_minimization", body)
    assert retry.status == 409  # applied exactly once, retry rejected
    assert client.get("/assessments/t1/profile").json()["revision"] == rev + 1


def test_live_server_round_trip(triage_catalog):
    workflow = AssessmentWorkflow(triage_catalog, MemoryStore(), LogicalClock())
    server = serve(Service(workflow), "127.0.0.1", 0, quiet=True)
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        request = urllib.request.Request(
            f"http://127.0.0.1:{port}/assessments",
            data=json.dumps({"assessment_id": "live", "actor": ACTOR}).encode("utf-8"),
            method="POST",
            headers={"Content-Type": "application/json"},
        )
        with urllib.request.urlopen(request) as response:
            assert response.status == 201
            assert json.loads(response.read())["revision"] == 1
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/assessments") as response:
            listed = json.loads(response.read())["assessments"]
            assert listed[0]["assessment_id"] == "live"
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)
