"""Exception types shared across the assessment engine.

Every error carries a stable ``code`` so the HTTP service and the CLI can
map failures to status codes / exit codes without string matching.
"""

from __future__ import annotations


class FriaError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def payload(self) -> dict:
        """JSON-safe description used by the service layer."""
        return {"error": self.code, "detail": str(self)}


class CatalogSyntaxError(FriaError):
    code = "syntax-error"

    def __init__(self, position: int, message: str):
        super().__init__(f"malformed document at offset {position}: {message}")
        self.position = position

    def payload(self) -> dict:
        return {"error": self.code, "position": self.position, "detail": str(self)}


class SchemaError(FriaError):
    code = "schema-error"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path

    def payload(self) -> dict:
        return {"error": self.code, "path": self.path, "detail": str(self)}


class UnsupportedVersion(FriaError):
    code = "unsupported-version"

    def __init__(self, version: str):
        super().__init__(f"unsupported schema_version {version!r}")
        self.version = version


class IncompleteProfile(FriaError):
    code = "IncompleteProfile"

    def __init__(self, missing: list[str]):
        super().__init__(f"profile incomplete, missing: {', '.join(missing)}")
        self.missing = list(missing)

    def payload(self) -> dict:
        return {"error": self.code, "missing": self.missing}


class QuestionNotApplicable(FriaError):
    code = "QuestionNotApplicable"

    def __init__(self, question_id: str):
        super().__init__(f"question {question_id} is not in the applicable set")
        self.question_id = question_id

    def payload(self) -> dict:
        return {"error": self.code, "question_id": self.question_id}


class MissingJustification(FriaError):
    code = "MissingJustification"

    def __init__(self, question_id: str):
        super().__init__(f"NotApplicable answer to {question_id} requires a note")
        self.question_id = question_id

    def payload(self) -> dict:
        return {"error": self.code, "question_id": self.question_id}


class IncompletePhase(FriaError):
    """A gate was attempted while items of the current phase are still open."""

    code = "IncompletePhase"

    def __init__(self, stage: str, missing: list[str]):
        super().__init__(f"{stage} incomplete, pending: {', '.join(missing)}")
        self.stage = stage
        self.missing = list(missing)

    def payload(self) -> dict:
        return {"error": self.code, "stage": self.stage, "missing": self.missing}


class PhaseIncomplete(FriaError):
    """Report construction requested before the workflow reached the output stage."""

    code = "PhaseIncomplete"

    def __init__(self, stage: str):
        super().__init__(f"assessment still in {stage}; report unavailable")
        self.stage = stage

    def payload(self) -> dict:
        return {"error": self.code, "stage": self.stage}


class NoScenarioApplicable(FriaError):
    code = "NoScenarioApplicable"

    def __init__(self, criterion_id: str):
        super().__init__(
            f"criterion {criterion_id} advanced but no scenario template passes the drivers"
        )
        self.criterion_id = criterion_id

    def payload(self) -> dict:
        return {"error": self.code, "criterion_id": self.criterion_id}


class EvidenceRequired(FriaError):
    code = "EvidenceRequired"

    def __init__(self, scenario_id: str):
        super().__init__(
            f"control for {scenario_id} claims effectiveness without evidence references"
        )
        self.scenario_id = scenario_id

    def payload(self) -> dict:
        return {"error": self.code, "scenario_id": self.scenario_id}


class MissingRationale(FriaError):
    code = "MissingRationale"

    def __init__(self, subject: str):
        super().__init__(f"{subject} requires a nonempty rationale")
        self.subject = subject


class ScenarioNotEligible(FriaError):
    code = "ScenarioNotEligible"

    def __init__(self, scenario_id: str):
        super().__init__(
            f"scenario {scenario_id} is not in the required or recommended buckets"
        )
        self.scenario_id = scenario_id

    def payload(self) -> dict:
        return {"error": self.code, "scenario_id": self.scenario_id}


class InvalidAction(FriaError):
    code = "InvalidAction"


class RevisionConflict(FriaError):
    code = "RevisionConflict"

    def __init__(self, expected: int, actual: int):
        super().__init__(f"expected revision {expected}, store is at {actual}")
        self.expected = expected
        self.actual = actual

    def payload(self) -> dict:
        return {"error": self.code, "expected": self.expected, "actual": self.actual}


class NotFound(FriaError):
    code = "NotFound"

    def __init__(self, what: str):
        super().__init__(f"{what} not found")
        self.what = what


class StalePhase(FriaError):
    """A gate or report was requested while upstream results are flagged stale."""

    code = "StalePhase"

    def __init__(self, phase: str):
        super().__init__(f"{phase} results are stale; re-run the phase first")
        self.phase = phase
