"""Assessment workflow: the gate-ordered state machine over stored records.

Every mutating operation loads the record, applies one change, saves a new
revision under an optimistic revision check, and appends exactly one audit
event carrying before/after content digests. Phase gates call into the pure
modules (filtering, checklist, scenarios, remediation); this module owns
sequencing, staleness and audit, nothing else.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Any, Callable, Mapping, Optional

from . import checklist, filtering, remediation, scenarios
from .canonical import content_digest
from .catalog import Catalog, validate_catalog
from .clock import LogicalClock, WallClock
from .errors import (
    IncompletePhase,
    InvalidAction,
    NotFound,
    PhaseIncomplete,
    RevisionConflict,
    SchemaError,
    StalePhase,
)
from .profile import (
    DriverSet,
    StakeholderRef,
    SystemProfile,
    apply_delta,
    complete_phase0,
    drivers,
    drivers_changed,
    profile_to_json,
)
from .store import (
    AssessmentPhase,
    AssessmentRecord,
    AuditEvent,
    GateRecord,
    Store,
)

Clock = LogicalClock | WallClock


class AssessmentWorkflow:
    """Drives one catalog's methodology over a store of assessment records."""

    def __init__(self, catalog: Catalog, store: Store, clock: Optional[Clock] = None):
        report = validate_catalog(catalog)
        if not report.ok:
            first = report.findings[0]
            raise SchemaError(first.path, f"invalid catalog: [{first.rule}] {first.message}")
        self.catalog = catalog
        self.store = store
        self.clock = clock if clock is not None else WallClock()

    # -- plumbing -----------------------------------------------------------

    def _mutate(
        self,
        assessment_id: str,
        expected_revision: int,
        actor: StakeholderRef,
        kind: str,
        subject: str,
        subject_view: Callable[[AssessmentRecord], Any],
        apply: Callable[[AssessmentRecord], AssessmentRecord],
    ) -> int:
        record = self.store.load(assessment_id)
        if record.revision != expected_revision:
            raise RevisionConflict(expected_revision, record.revision)
        at = self.clock.tick()
        before = subject_view(record)
        updated = apply(record)
        after = subject_view(updated)
        revision = self.store.save(updated, expected_revision)
        self.store.append_audit(
            assessment_id,
            AuditEvent(
                seq=0,
                at=at,
                actor=actor,
                kind=kind,
                subject=subject,
                before_digest=content_digest(before),
                after_digest=content_digest(after),
            ),
        )
        return revision

    def _drivers(self, record: AssessmentRecord) -> DriverSet:
        return drivers(record.profile)

    # -- lifecycle ----------------------------------------------------------

    def create(self, assessment_id: str, actor: StakeholderRef) -> int:
        if self.store.exists(assessment_id):
            raise InvalidAction(f"assessment {assessment_id!r} already exists")
        record = AssessmentRecord(id=assessment_id)
        revision = self.store.save(record, expected_revision=0)
        self.store.append_audit(
            assessment_id,
            AuditEvent(
                seq=0,
                at=self.clock.tick(),
                actor=actor,
                kind="assessment_created",
                subject="assessment",
                before_digest=content_digest(None),
                after_digest=content_digest(assessment_id),
            ),
        )
        return revision

    def update_profile(
        self,
        assessment_id: str,
        delta: Mapping[str, Any],
        actor: StakeholderRef,
        expected_revision: int,
    ) -> int:
        """Apply a field delta as a new revision.

        Driver-affecting changes after Phase 0 completion mark downstream
        results stale and send the workflow back to the Phase 1 gate; the
        recorded answers and evaluations are kept for the audit trail.
        """

        def apply(record: AssessmentRecord) -> AssessmentRecord:
            new_profile = apply_delta(record.profile, delta)
            updated = replace(record, profile=new_profile)
            if record.phase is not AssessmentPhase.PHASE0 and drivers_changed(
                record.profile, new_profile
            ):
                updated = replace(
                    updated,
                    stale_phase1=True,
                    stale_phase2=record.phase in (AssessmentPhase.PHASE2, AssessmentPhase.OUTPUT)
                    or record.stale_phase2,
                    phase=AssessmentPhase.PHASE1
                    if record.phase in (AssessmentPhase.PHASE2, AssessmentPhase.OUTPUT)
                    else record.phase,
                )
            return updated

        return self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="profile_updated",
            subject="profile",
            subject_view=lambda r: profile_to_json(r.profile),
            apply=apply,
        )

    def complete_phase0(
        self, assessment_id: str, actor: StakeholderRef, expected_revision: int
    ) -> tuple[int, DriverSet]:
        record = self.store.load(assessment_id)
        driver_set = complete_phase0(record.profile)

        def apply(rec: AssessmentRecord) -> AssessmentRecord:
            if rec.phase is not AssessmentPhase.PHASE0:
                raise PhaseIncomplete(rec.phase.value)
            return replace(rec, phase=AssessmentPhase.PHASE1)

        revision = self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="phase0_completed",
            subject="phase",
            subject_view=lambda r: r.phase.value,
            apply=apply,
        )
        return revision, driver_set

    def applicable_questions(self, assessment_id: str):
        record = self.store.load(assessment_id)
        if record.phase is AssessmentPhase.PHASE0:
            raise PhaseIncomplete(AssessmentPhase.PHASE0.value)
        return filtering.applicable_questions(self.catalog, self._drivers(record))

    def record_answer(
        self,
        assessment_id: str,
        answer: checklist.Answer,
        expected_revision: int,
    ) -> int:
        def apply(record: AssessmentRecord) -> AssessmentRecord:
            if record.phase is not AssessmentPhase.PHASE1:
                raise PhaseIncomplete(record.phase.value)
            applicable = {
                q.id for q in filtering.applicable_questions(self.catalog, self._drivers(record))
            }
            stamped = replace(answer, answered_at=self.clock.now())
            updated_answers = checklist.record_answer(record.answers, stamped, applicable)
            return replace(record, answers=updated_answers)

        return self._mutate(
            assessment_id,
            expected_revision,
            answer.respondent,
            kind="answer_recorded",
            subject=f"answers/{answer.question_id}",
            subject_view=lambda r: (
                checklist.answer_to_json(r.answers[answer.question_id])
                if answer.question_id in r.answers
                else None
            ),
            apply=apply,
        )

    def complete_phase1(
        self, assessment_id: str, actor: StakeholderRef, expected_revision: int
    ) -> tuple[int, checklist.GateDecision]:
        record = self.store.load(assessment_id)
        if record.phase is not AssessmentPhase.PHASE1:
            raise PhaseIncomplete(record.phase.value)
        decision = checklist.phase1_complete(
            record.answers, self.catalog, self._drivers(record)
        )
        instances = scenarios.instantiate_scenarios(
            decision.advancing, self.catalog, self._drivers(record)
        )

        def apply(rec: AssessmentRecord) -> AssessmentRecord:
            return replace(
                rec,
                phase=AssessmentPhase.PHASE2,
                phase1_gate=GateRecord(
                    advancing=decision.advancing, excluded=dict(decision.excluded)
                ),
                scenarios=tuple(instances),
                stale_phase1=False,
            )

        revision = self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="phase1_completed",
            subject="phase",
            subject_view=lambda r: r.phase.value,
            apply=apply,
        )
        return revision, decision

    def scenario_instances(self, assessment_id: str) -> list[scenarios.ScenarioInstance]:
        record = self.store.load(assessment_id)
        return list(record.scenarios)

    def evaluate_scenario(
        self,
        assessment_id: str,
        scenario_id: str,
        dimensions: scenarios.DimensionScores,
        control: scenarios.ControlAssessment,
        rationale: str,
        actor: StakeholderRef,
        expected_revision: int,
    ) -> tuple[int, scenarios.ScenarioEvaluation]:
        record = self.store.load(assessment_id)
        instance = next((s for s in record.scenarios if s.id == scenario_id), None)
        if instance is None:
            raise NotFound(f"scenario {scenario_id}")
        evaluation = scenarios.make_evaluation(
            instance, dimensions, control, rationale, self.catalog.thresholds
        )

        def apply(rec: AssessmentRecord) -> AssessmentRecord:
            if rec.phase is not AssessmentPhase.PHASE2:
                raise PhaseIncomplete(rec.phase.value)
            updated = dict(rec.evaluations)
            updated[scenario_id] = evaluation
            return replace(rec, evaluations=updated)

        revision = self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="scenario_evaluated",
            subject=f"evaluations/{scenario_id}",
            subject_view=lambda r: (
                scenarios.evaluation_to_json(r.evaluations[scenario_id])
                if scenario_id in r.evaluations
                else None
            ),
            apply=apply,
        )
        return revision, evaluation

    def override_evaluation(
        self,
        assessment_id: str,
        scenario_id: str,
        rationale: str,
        actor: StakeholderRef,
        expected_revision: int,
        classification: Optional[scenarios.Classification] = None,
        significant: Optional[bool] = None,
    ) -> int:
        def apply(record: AssessmentRecord) -> AssessmentRecord:
            if scenario_id not in record.evaluations:
                raise NotFound(f"evaluation of {scenario_id}")
            overridden = scenarios.apply_override(
                record.evaluations[scenario_id],
                rationale,
                actor,
                classification=classification,
                significant=significant,
            )
            updated = dict(record.evaluations)
            updated[scenario_id] = overridden
            return replace(record, evaluations=updated)

        return self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="evaluation_overridden",
            subject=f"evaluations/{scenario_id}",
            subject_view=lambda r: (
                scenarios.evaluation_to_json(r.evaluations[scenario_id])
                if scenario_id in r.evaluations
                else None
            ),
            apply=apply,
        )

    def add_action(
        self,
        assessment_id: str,
        action: remediation.RemediationAction,
        actor: StakeholderRef,
        expected_revision: int,
    ) -> int:
        def apply(record: AssessmentRecord) -> AssessmentRecord:
            if record.phase not in (AssessmentPhase.PHASE2, AssessmentPhase.OUTPUT):
                raise PhaseIncomplete(record.phase.value)
            partition = filtering.output_scenarios(record.live_evaluations().values())
            updated = remediation.add_action(record.ledger, action, partition)
            return replace(record, ledger=updated)

        return self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="action_added",
            subject=f"actions/{action.id}",
            subject_view=lambda r: (
                remediation.action_to_json(r.ledger.actions_by_id()[action.id])
                if action.id in r.ledger.actions_by_id()
                else None
            ),
            apply=apply,
        )

    def next_action_id(self, assessment_id: str) -> str:
        record = self.store.load(assessment_id)
        return f"act-{len(record.ledger.actions) + 1:04d}"

    def set_action_status(
        self,
        assessment_id: str,
        action_id: str,
        status: remediation.ActionStatus,
        actor: StakeholderRef,
        expected_revision: int,
    ) -> int:
        """Update action progress; completing an action for a scenario still
        classified Relevant flags that scenario for re-evaluation."""

        def apply(record: AssessmentRecord) -> AssessmentRecord:
            by_id = record.ledger.actions_by_id()
            if action_id not in by_id:
                raise NotFound(f"action {action_id}")
            action = by_id[action_id]
            updated_actions = tuple(
                replace(a, status=status) if a.id == action_id else a
                for a in record.ledger.actions
            )
            suggested = set(record.reevaluation_suggested)
            if status is remediation.ActionStatus.DONE:
                evaluation = record.evaluations.get(action.scenario_id)
                if (
                    evaluation is not None
                    and evaluation.classification is scenarios.Classification.RELEVANT
                ):
                    suggested.add(action.scenario_id)
            return replace(
                record,
                ledger=remediation.RemediationLedger(actions=updated_actions),
                reevaluation_suggested=tuple(sorted(suggested)),
            )

        return self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="action_status_changed",
            subject=f"actions/{action_id}",
            subject_view=lambda r: (
                remediation.action_to_json(r.ledger.actions_by_id()[action_id])
                if action_id in r.ledger.actions_by_id()
                else None
            ),
            apply=apply,
        )

    def complete_phase2(
        self, assessment_id: str, actor: StakeholderRef, expected_revision: int
    ) -> tuple[int, dict[str, scenarios.CriterionFinalClassification]]:
        record = self.store.load(assessment_id)
        if record.phase is not AssessmentPhase.PHASE2:
            raise PhaseIncomplete(record.phase.value)
        if record.stale_phase1:
            raise StalePhase(AssessmentPhase.PHASE1.value)
        unevaluated = [s.id for s in record.scenarios if s.id not in record.evaluations]
        if unevaluated:
            raise IncompletePhase("phase2", unevaluated)

        finalizations: dict[str, scenarios.CriterionFinalClassification] = {}
        gate = record.phase1_gate or GateRecord()
        for criterion_id in gate.advancing:
            evals = [
                record.evaluations[s.id]
                for s in record.scenarios
                if s.criterion_id == criterion_id
            ]
            finalizations[criterion_id] = scenarios.finalize_criterion(criterion_id, evals)

        def apply(rec: AssessmentRecord) -> AssessmentRecord:
            return replace(
                rec,
                phase=AssessmentPhase.OUTPUT,
                finalizations=finalizations,
                stale_phase2=False,
            )

        revision = self._mutate(
            assessment_id,
            expected_revision,
            actor,
            kind="phase2_completed",
            subject="phase",
            subject_view=lambda r: r.phase.value,
            apply=apply,
        )
        return revision, finalizations

    # -- reads --------------------------------------------------------------

    def load_record(self, assessment_id: str) -> AssessmentRecord:
        return self.store.load(assessment_id)

    def audit_trail(self, assessment_id: str) -> list[AuditEvent]:
        return self.store.read_audit(assessment_id)
