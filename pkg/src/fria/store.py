"""Revisioned assessment records with an append-only audit trail.

Each assessment lives in its own directory: one canonical JSON file per
revision plus an audit log with one canonical event per line. Historical
revisions are never rewritten. Writes take an expected revision and fail
with RevisionConflict when the head moved, which serializes concurrent
writers without any locking visible to callers.

The Store base class is the boundary a future database backend would
implement; FileStore is the shipped one, MemoryStore backs fast tests.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional

from . import checklist, remediation, scenarios
from .canonical import canonical_bytes, canonical_line
from .errors import NotFound, RevisionConflict, SchemaError
from .jsoncheck import (
    get_required,
    reject_unknown_keys,
    require_bool,
    require_int,
    require_object,
    require_string,
)
from .profile import (
    StakeholderRef,
    SystemProfile,
    profile_from_json,
    profile_to_json,
    stakeholder_from_json,
    stakeholder_to_json,
)


class AssessmentPhase(str, Enum):
    PHASE0 = "Phase0"
    PHASE1 = "Phase1"
    PHASE2 = "Phase2"
    OUTPUT = "Output"


PHASE_ORDER = [
    AssessmentPhase.PHASE0,
    AssessmentPhase.PHASE1,
    AssessmentPhase.PHASE2,
    AssessmentPhase.OUTPUT,
]


@dataclass(frozen=True)
class GateRecord:
    advancing: tuple[str, ...] = ()
    excluded: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class AssessmentRecord:
    id: str
    revision: int = 0
    phase: AssessmentPhase = AssessmentPhase.PHASE0
    profile: SystemProfile = field(default_factory=SystemProfile)
    answers: Mapping[str, checklist.Answer] = field(default_factory=dict)
    scenarios: tuple[scenarios.ScenarioInstance, ...] = ()
    evaluations: Mapping[str, scenarios.ScenarioEvaluation] = field(default_factory=dict)
    ledger: remediation.RemediationLedger = field(default_factory=remediation.RemediationLedger)
    phase1_gate: Optional[GateRecord] = None
    finalizations: Mapping[str, scenarios.CriterionFinalClassification] = field(
        default_factory=dict
    )
    stale_phase1: bool = False
    stale_phase2: bool = False
    reevaluation_suggested: tuple[str, ...] = ()

    def live_evaluations(self) -> dict[str, scenarios.ScenarioEvaluation]:
        """Evaluations for the current scenario instances only.

        After a staleness regression re-runs the Phase 1 gate, evaluations of
        scenarios that no longer exist stay in the record (history is never
        erased) but must not feed gates or reports.
        """
        live = {s.id for s in self.scenarios}
        return {sid: ev for sid, ev in self.evaluations.items() if sid in live}


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    at: str
    actor: StakeholderRef
    kind: str
    subject: str
    before_digest: str
    after_digest: str


@dataclass(frozen=True)
class AssessmentSummary:
    id: str
    revision: int
    phase: AssessmentPhase
    system_name: str


# ---------------------------------------------------------------------------
# Record serialization
# ---------------------------------------------------------------------------


def record_to_json(record: AssessmentRecord) -> dict:
    return {
        "id": record.id,
        "revision": record.revision,
        "phase": record.phase.value,
        "profile": profile_to_json(record.profile),
        "answers": {
            qid: checklist.answer_to_json(a) for qid, a in sorted(record.answers.items())
        },
        "scenarios": [scenarios.instance_to_json(s) for s in record.scenarios],
        "evaluations": {
            sid: scenarios.evaluation_to_json(e) for sid, e in sorted(record.evaluations.items())
        },
        "ledger": remediation.ledger_to_json(record.ledger),
        "phase1_gate": (
            {"advancing": list(record.phase1_gate.advancing), "excluded": dict(record.phase1_gate.excluded)}
            if record.phase1_gate
            else None
        ),
        "finalizations": {
            cid: {
                "criterion_id": f.criterion_id,
                "classification": f.classification.value,
                "scenario_ids": list(f.scenario_ids),
            }
            for cid, f in sorted(record.finalizations.items())
        },
        "stale_phase1": record.stale_phase1,
        "stale_phase2": record.stale_phase2,
        "reevaluation_suggested": sorted(record.reevaluation_suggested),
    }


def record_from_json(value: Any, path: str = "record") -> AssessmentRecord:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj,
        {
            "id",
            "revision",
            "phase",
            "profile",
            "answers",
            "scenarios",
            "evaluations",
            "ledger",
            "phase1_gate",
            "finalizations",
            "stale_phase1",
            "stale_phase2",
            "reevaluation_suggested",
        },
        path,
    )
    raw_phase = require_string(get_required(obj, "phase", path), f"{path}.phase")
    try:
        phase = AssessmentPhase(raw_phase)
    except ValueError:
        raise SchemaError(f"{path}.phase", f"unknown phase {raw_phase!r}") from None

    gate = None
    raw_gate = obj.get("phase1_gate")
    if raw_gate is not None:
        gate_obj = require_object(raw_gate, f"{path}.phase1_gate")
        reject_unknown_keys(gate_obj, {"advancing", "excluded"}, f"{path}.phase1_gate")
        gate = GateRecord(
            advancing=tuple(gate_obj.get("advancing", [])),
            excluded=dict(gate_obj.get("excluded", {})),
        )

    finalizations = {}
    for cid, raw in require_object(obj.get("finalizations", {}), f"{path}.finalizations").items():
        fin_path = f"{path}.finalizations.{cid}"
        fin = require_object(raw, fin_path)
        finalizations[cid] = scenarios.CriterionFinalClassification(
            criterion_id=require_string(get_required(fin, "criterion_id", fin_path), f"{fin_path}.criterion_id"),
            classification=scenarios.Classification(
                require_string(get_required(fin, "classification", fin_path), f"{fin_path}.classification")
            ),
            scenario_ids=tuple(fin.get("scenario_ids", [])),
        )

    return AssessmentRecord(
        id=require_string(get_required(obj, "id", path), f"{path}.id"),
        revision=require_int(get_required(obj, "revision", path), f"{path}.revision"),
        phase=phase,
        profile=profile_from_json(get_required(obj, "profile", path), f"{path}.profile"),
        answers={
            qid: checklist.answer_from_json(raw, f"{path}.answers.{qid}")
            for qid, raw in require_object(obj.get("answers", {}), f"{path}.answers").items()
        },
        scenarios=tuple(
            scenarios.instance_from_json(raw, f"{path}.scenarios[{i}]")
            for i, raw in enumerate(obj.get("scenarios", []))
        ),
        evaluations={
            sid: scenarios.evaluation_from_json(raw, f"{path}.evaluations.{sid}")
            for sid, raw in require_object(
                obj.get("evaluations", {}), f"{path}.evaluations"
            ).items()
        },
        ledger=remediation.ledger_from_json(obj.get("ledger", {"actions": []}), f"{path}.ledger"),
        phase1_gate=gate,
        finalizations=finalizations,
        stale_phase1=require_bool(obj.get("stale_phase1", False), f"{path}.stale_phase1"),
        stale_phase2=require_bool(obj.get("stale_phase2", False), f"{path}.stale_phase2"),
        reevaluation_suggested=tuple(obj.get("reevaluation_suggested", [])),
    )


def event_to_json(event: AuditEvent) -> dict:
    return {
        "seq": event.seq,
        "at": event.at,
        "actor": stakeholder_to_json(event.actor),
        "kind": event.kind,
        "subject": event.subject,
        "before_digest": event.before_digest,
        "after_digest": event.after_digest,
    }


def event_from_json(value: Any, path: str = "event") -> AuditEvent:
    obj = require_object(value, path)
    return AuditEvent(
        seq=require_int(get_required(obj, "seq", path), f"{path}.seq"),
        at=require_string(get_required(obj, "at", path), f"{path}.at"),
        actor=stakeholder_from_json(get_required(obj, "actor", path), f"{path}.actor"),
        kind=require_string(get_required(obj, "kind", path), f"{path}.kind"),
        subject=require_string(get_required(obj, "subject", path), f"{path}.subject"),
        before_digest=require_string(
            get_required(obj, "before_digest", path), f"{path}.before_digest"
        ),
        after_digest=require_string(
            get_required(obj, "after_digest", path), f"{path}.after_digest"
        ),
    )


# ---------------------------------------------------------------------------
# Stores
# ---------------------------------------------------------------------------


class Store:
    """Persistence boundary: revisioned records plus a per-assessment audit log."""

    def save(self, record: AssessmentRecord, expected_revision: int) -> int:
        raise NotImplementedError

    def load(self, assessment_id: str, revision: Optional[int] = None) -> AssessmentRecord:
        raise NotImplementedError

    def head_revision(self, assessment_id: str) -> int:
        raise NotImplementedError

    def exists(self, assessment_id: str) -> bool:
        try:
            self.head_revision(assessment_id)
            return True
        except NotFound:
            return False

    def list_assessments(self) -> list[AssessmentSummary]:
        raise NotImplementedError

    def append_audit(self, assessment_id: str, event: AuditEvent) -> int:
        """Append with store-assigned gapless seq; event.seq is ignored."""
        raise NotImplementedError

    def read_audit(self, assessment_id: str) -> list[AuditEvent]:
        raise NotImplementedError


class FileStore(Store):
    """Directory-per-assessment layout: rev-<n>.json files plus audit.log."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def _assessment_lock(self, assessment_id: str) -> threading.Lock:
        with self._lock:
            return self._locks.setdefault(assessment_id, threading.Lock())

    def _dir(self, assessment_id: str) -> Path:
        return self.root / assessment_id

    def _rev_path(self, assessment_id: str, revision: int) -> Path:
        return self._dir(assessment_id) / f"rev-{revision}.json"

    def head_revision(self, assessment_id: str) -> int:
        directory = self._dir(assessment_id)
        if not directory.is_dir():
            raise NotFound(f"assessment {assessment_id}")
        revisions = [
            int(p.stem.split("-", 1)[1])
            for p in directory.glob("rev-*.json")
        ]
        if not revisions:
            raise NotFound(f"assessment {assessment_id}")
        return max(revisions)

    def save(self, record: AssessmentRecord, expected_revision: int) -> int:
        with self._assessment_lock(record.id):
            try:
                head = self.head_revision(record.id)
            except NotFound:
                head = 0
            if head != expected_revision:
                raise RevisionConflict(expected_revision, head)
            new_revision = expected_revision + 1
            stored = replace(record, revision=new_revision)
            directory = self._dir(record.id)
            directory.mkdir(parents=True, exist_ok=True)
            target = self._rev_path(record.id, new_revision)
            tmp = target.with_suffix(".json.tmp")
            tmp.write_bytes(canonical_bytes(record_to_json(stored)))
            tmp.replace(target)
            return new_revision

    def load(self, assessment_id: str, revision: Optional[int] = None) -> AssessmentRecord:
        if revision is None:
            revision = self.head_revision(assessment_id)
        path = self._rev_path(assessment_id, revision)
        if not path.is_file():
            raise NotFound(f"assessment {assessment_id} revision {revision}")
        return record_from_json(json.loads(path.read_text(encoding="utf-8")))

    def list_assessments(self) -> list[AssessmentSummary]:
        summaries = []
        for directory in sorted(self.root.iterdir()):
            if not directory.is_dir():
                continue
            try:
                record = self.load(directory.name)
            except NotFound:
                continue
            summaries.append(
                AssessmentSummary(
                    id=record.id,
                    revision=record.revision,
                    phase=record.phase,
                    system_name=record.profile.system_name,
                )
            )
        return summaries

    def append_audit(self, assessment_id: str, event: AuditEvent) -> int:
        with self._assessment_lock(assessment_id):
            directory = self._dir(assessment_id)
            directory.mkdir(parents=True, exist_ok=True)
            log = directory / "audit.log"
            seq = 0
            if log.is_file():
                with log.open("r", encoding="utf-8") as handle:
                    seq = sum(1 for _ in handle)
            stored = replace(event, seq=seq + 1)
            with log.open("a", encoding="utf-8") as handle:
                handle.write(canonical_line(event_to_json(stored)) + "\n")
            return stored.seq

    def read_audit(self, assessment_id: str) -> list[AuditEvent]:
        log = self._dir(assessment_id) / "audit.log"
        if not log.is_file():
            return []
        events = []
        with log.open("r", encoding="utf-8") as handle:
            for i, line in enumerate(handle):
                events.append(event_from_json(json.loads(line), f"audit[{i}]"))
        return events


class MemoryStore(Store):
    """In-process store with the same optimistic-concurrency contract."""

    def __init__(self):
        self._lock = threading.Lock()
        self._revisions: dict[str, list[AssessmentRecord]] = {}
        self._audit: dict[str, list[AuditEvent]] = {}

    def head_revision(self, assessment_id: str) -> int:
        with self._lock:
            revisions = self._revisions.get(assessment_id)
            if not revisions:
                raise NotFound(f"assessment {assessment_id}")
            return len(revisions)

    def save(self, record: AssessmentRecord, expected_revision: int) -> int:
        with self._lock:
            revisions = self._revisions.setdefault(record.id, [])
            head = len(revisions)
            if head != expected_revision:
                raise RevisionConflict(expected_revision, head)
            stored = replace(record, revision=head + 1)
            revisions.append(stored)
            return stored.revision

    def load(self, assessment_id: str, revision: Optional[int] = None) -> AssessmentRecord:
        with self._lock:
            revisions = self._revisions.get(assessment_id)
            if not revisions:
                raise NotFound(f"assessment {assessment_id}")
            if revision is None:
                return revisions[-1]
            if not 1 <= revision <= len(revisions):
                raise NotFound(f"assessment {assessment_id} revision {revision}")
            return revisions[revision - 1]

    def list_assessments(self) -> list[AssessmentSummary]:
        with self._lock:
            return [
                AssessmentSummary(
                    id=revs[-1].id,
                    revision=revs[-1].revision,
                    phase=revs[-1].phase,
                    system_name=revs[-1].profile.system_name,
                )
                for _, revs in sorted(self._revisions.items())
                if revs
            ]

    def append_audit(self, assessment_id: str, event: AuditEvent) -> int:
        with self._lock:
            log = self._audit.setdefault(assessment_id, [])
            stored = replace(event, seq=len(log) + 1)
            log.append(stored)
            return stored.seq

    def read_audit(self, assessment_id: str) -> list[AuditEvent]:
        with self._lock:
            return list(self._audit.get(assessment_id, []))
