from __future__ import annotations

import pytest

from fria.catalog import AnswerValue
from fria.checklist import Answer
from fria.errors import (
    IncompletePhase,
    IncompleteProfile,
    InvalidAction,
    NotFound,
    PhaseIncomplete,
    QuestionNotApplicable,
    RevisionConflict,
)
from fria.profile import StakeholderRef
from fria.remediation import ActionStatus
from fria.scenarios import Classification, ControlAssessment, ControlEffectiveness, DimensionScores
from fria.store import AssessmentPhase

from helpers import memory_workflow, run_fixture_session

ACTOR = StakeholderRef(name="Alex Kim", role="governance_lead")

PROFILE_DELTA = {
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


def answer(qid: str, value: str, note: str = "") -> Answer:
    return Answer(question_id=qid, value=AnswerValue(value), note=note, respondent=ACTOR)


def start(triage_catalog):
    workflow = memory_workflow(triage_catalog)
    rev = workflow.create("t1", ACTOR)
    rev = workflow.update_profile("t1", PROFILE_DELTA, ACTOR, rev)
    return workflow, rev


def test_create_then_duplicate_create_rejected(triage_catalog):
    workflow = memory_workflow(triage_catalog)
    workflow.create("t1", ACTOR)
    with pytest.raises(InvalidAction):
        workflow.create("t1", ACTOR)


def test_phase0_requires_complete_profile(triage_catalog):
    workflow = memory_workflow(triage_catalog)
    rev = workflow.create("t1", ACTOR)
    with pytest.raises(IncompleteProfile) as exc:
        workflow.complete_phase0("t1", ACTOR, rev)
    assert exc.value.missing == ["system_name", "purpose", "lifecycle_stage", "stewardship"]


def test_answer_before_phase1_rejected(triage_catalog):
    workflow, rev = start(triage_catalog)
    with pytest.raises(PhaseIncomplete):
        workflow.record_answer("t1", answer("dg_q_minimization", "Adequate"), rev)


def test_stale_write_conflicts(triage_catalog):
    workflow, rev = start(triage_catalog)
    with pytest.raises(RevisionConflict) as exc:
        workflow.update_profile("t1", {"purpose": "x"}, ACTOR, rev - 1)
    assert exc.value.actual == rev


def test_every_mutation_appends_exactly_one_audit_event(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev = workflow.record_answer("t1", answer("dg_q_minimization", "Adequate"), rev)
    events = workflow.audit_trail("t1")
    assert [e.kind for e in events] == [
        "assessment_created",
        "profile_updated",
        "phase0_completed",
        "answer_recorded",
    ]
    assert [e.seq for e in events] == [1, 2, 3, 4]
    assert rev == 4  # one revision per mutation


def test_noop_delta_creates_revision_with_equal_digests(triage_catalog):
    workflow, rev = start(triage_catalog)
    new_rev = workflow.update_profile("t1", {}, ACTOR, rev)
    assert new_rev == rev + 1
    last = workflow.audit_trail("t1")[-1]
    assert last.kind == "profile_updated"
    assert last.before_digest == last.after_digest


def test_inapplicable_answer_rejected_through_workflow(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    with pytest.raises(QuestionNotApplicable):
        workflow.record_answer("t1", answer("dg_q_genai_provenance", "Adequate"), rev)


def test_phase1_gate_requires_all_applicable_answers(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev = workflow.record_answer("t1", answer("dg_q_minimization", "Adequate"), rev)
    with pytest.raises(IncompletePhase) as exc:
        workflow.complete_phase1("t1", ACTOR, rev)
    assert "ho_q_review_mechanism" in exc.value.missing


def full_phase1(workflow, rev):
    for qid, value, note in [
        ("dg_q_minimization", "Adequate", ""),
        ("dg_q_external_sources", "Adequate", ""),
        ("ho_q_review_mechanism", "Inadequate", "no formalized review"),
        ("fa_q_demographic_bias", "Inadequate", ""),
        ("fa_q_accessibility", "Partial", ""),
    ]:
        rev = workflow.record_answer("t1", answer(qid, value, note), rev)
    return workflow.complete_phase1("t1", ACTOR, rev)


def test_phase1_gate_outcome_and_scenario_instantiation(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev, decision = full_phase1(workflow, rev)
    assert set(decision.advancing) == {"fa_equal_treatment", "ho_meaningful_control"}
    record = workflow.load_record("t1")
    assert record.phase is AssessmentPhase.PHASE2
    assert [s.id for s in record.scenarios] == [
        "fa_s_underrepresentation",
        "ho_s_automation_bias",
    ]


def test_evaluation_revision_retained_in_history(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev, _ = full_phase1(workflow, rev)
    before_len = len(workflow.audit_trail("t1"))
    rev, first = workflow.evaluate_scenario(
        "t1",
        "ho_s_automation_bias",
        DimensionScores(3, 2, 2, 2),
        ControlAssessment(effectiveness=ControlEffectiveness.ABSENT, control_owner=ACTOR),
        "no validation process",
        ACTOR,
        rev,
    )
    assert first.classification is Classification.RELEVANT
    rev, second = workflow.evaluate_scenario(
        "t1",
        "ho_s_automation_bias",
        DimensionScores(2, 2, 1, 2),
        ControlAssessment(
            effectiveness=ControlEffectiveness.PARTIALLY_EFFECTIVE,
            evidence_refs=("override-protocol",),
            control_owner=ACTOR,
        ),
        "override protocols adopted",
        ACTOR,
        rev,
    )
    assert second.classification is Classification.PARTIALLY_RELEVANT
    # exactly one audit event per evaluation, prior revision still loadable
    assert len(workflow.audit_trail("t1")) == before_len + 2
    prior = workflow.store.load("t1", revision=rev - 1)
    assert (
        prior.evaluations["ho_s_automation_bias"].classification is Classification.RELEVANT
    )


def test_unknown_scenario_rejected(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev, _ = full_phase1(workflow, rev)
    with pytest.raises(NotFound):
        workflow.evaluate_scenario(
            "t1",
            "dg_s_exposure",  # data governance did not advance
            DimensionScores(1, 1, 1, 1),
            ControlAssessment(effectiveness=ControlEffectiveness.ABSENT),
            "r",
            ACTOR,
            rev,
        )


def test_phase2_gate_requires_all_evaluations(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev, _ = full_phase1(workflow, rev)
    with pytest.raises(IncompletePhase) as exc:
        workflow.complete_phase2("t1", ACTOR, rev)
    assert set(exc.value.missing) == {"fa_s_underrepresentation", "ho_s_automation_bias"}


def test_driver_change_after_phase0_marks_stale_and_regresses(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev, _ = full_phase1(workflow, rev)
    assert workflow.load_record("t1").phase is AssessmentPhase.PHASE2

    questions_before = {q.id for q in workflow.applicable_questions("t1")}
    rev = workflow.update_profile(
        "t1",
        {"domain_flags": ["health", "critical_decision", "generative_ai"]},
        ACTOR,
        rev,
    )
    record = workflow.load_record("t1")
    assert record.stale_phase1 is True
    assert record.phase is AssessmentPhase.PHASE1
    questions_after = {q.id for q in workflow.applicable_questions("t1")}
    assert questions_before < questions_after
    assert "dg_q_genai_provenance" in questions_after

    # staleness is monotone until the phase is re-run
    rev = workflow.update_profile("t1", {"purpose": "still triage"}, ACTOR, rev)
    assert workflow.load_record("t1").stale_phase1 is True

    # answering the newly applicable question and re-running the gate clears it
    rev = workflow.record_answer("t1", answer("dg_q_genai_provenance", "Adequate"), rev)
    rev, decision = workflow.complete_phase1("t1", ACTOR, rev)
    record = workflow.load_record("t1")
    assert record.stale_phase1 is False
    assert record.phase is AssessmentPhase.PHASE2
    # the generative oversight scenario is now instantiated as well
    assert "ho_s_genai_hallucination" in {s.id for s in record.scenarios}


def test_stewardship_change_does_not_regress(triage_catalog):
    workflow, rev = start(triage_catalog)
    rev, _ = workflow.complete_phase0("t1", ACTOR, rev)
    rev, _ = full_phase1(workflow, rev)
    rev = workflow.update_profile(
        "t1",
        {
            "stewardship": {
                "owner": {"name": "Noor Haddad", "role": "governance_lead"},
                "review_interval_days": 30,
                "last_reviewed": "2025-01-01T00:00:00Z",
            }
        },
        ACTOR,
        rev,
    )
    record = workflow.load_record("t1")
    assert record.stale_phase1 is False
    assert record.phase is AssessmentPhase.PHASE2


def test_action_done_on_relevant_scenario_suggests_reevaluation(triage_catalog):
    workflow, assessment_id = run_fixture_session(triage_catalog)
    record = workflow.load_record(assessment_id)
    rev = record.revision
    # fairness scenario stayed Relevant; completing its action raises the flag
    fairness_action = next(
        a for a in record.ledger.actions if a.scenario_id == "fa_s_underrepresentation"
    )
    rev = workflow.set_action_status(
        assessment_id, fairness_action.id, ActionStatus.DONE, ACTOR, rev
    )
    record = workflow.load_record(assessment_id)
    assert record.reevaluation_suggested == ("fa_s_underrepresentation",)
    # the oversight action closes without a flag: scenario is PartiallyRelevant
    oversight_action = next(
        a for a in record.ledger.actions if a.scenario_id == "ho_s_automation_bias"
    )
    workflow.set_action_status(
        assessment_id, oversight_action.id, ActionStatus.DONE, ACTOR, rev
    )
    record = workflow.load_record(assessment_id)
    assert record.reevaluation_suggested == ("fa_s_underrepresentation",)


def test_fixture_session_runs_to_output(triage_catalog):
    workflow, assessment_id = run_fixture_session(triage_catalog)
    record = workflow.load_record(assessment_id)
    assert record.phase is AssessmentPhase.OUTPUT
    assert record.finalizations["fa_equal_treatment"].classification is Classification.RELEVANT
    assert (
        record.finalizations["ho_meaningful_control"].classification
        is Classification.PARTIALLY_RELEVANT
    )
