"""Phase 1: the rights checklist and per-criterion relevance scoring.

Stakeholders answer the driver-filtered questions on a four-value scale.
Relevance aggregates by max, not mean: one severe gap is enough to make a
criterion relevant, and many adequate answers cannot dilute it. Answers of
NotApplicable never contribute, and must carry a justification note.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping

from .catalog import AnswerValue, Catalog
from .errors import IncompletePhase, MissingJustification, QuestionNotApplicable, SchemaError
from .filtering import advancing_criteria, applicable_questions
from .jsoncheck import (
    get_required,
    reject_unknown_keys,
    require_object,
    require_string,
    require_string_array,
)
from .profile import DriverSet, StakeholderRef, stakeholder_from_json, stakeholder_to_json


class RelevanceBand(str, Enum):
    NONE = "None"
    MODERATE = "Moderate"
    HIGH = "High"


BAND_BY_SCORE = {0: RelevanceBand.NONE, 1: RelevanceBand.MODERATE, 2: RelevanceBand.HIGH}

# Phase 1 gate exclusion reasons, referenced by reports and tests.
REASON_BELOW_THRESHOLD = "score below threshold"
REASON_UNASSESSED = "unassessed"
REASON_NO_APPLICABLE_QUESTIONS = "no applicable questions"


@dataclass(frozen=True)
class Answer:
    question_id: str
    value: AnswerValue
    note: str = ""
    evidence_refs: tuple[str, ...] = ()
    respondent: StakeholderRef = StakeholderRef(name="", role="unspecified")
    answered_at: str = ""


@dataclass(frozen=True)
class CriterionRelevance:
    criterion_id: str
    score: int
    band: RelevanceBand
    contributing_question_ids: tuple[str, ...]
    unassessed: bool


@dataclass(frozen=True)
class GateDecision:
    advancing: tuple[str, ...]
    excluded: Mapping[str, str]

    def to_json(self) -> dict:
        return {"advancing": list(self.advancing), "excluded": dict(self.excluded)}


def record_answer(
    answers: Mapping[str, Answer], answer: Answer, applicable_ids: Iterable[str]
) -> dict[str, Answer]:
    """Store one answer; re-answering a question replaces the prior value."""
    if answer.question_id not in set(applicable_ids):
        raise QuestionNotApplicable(answer.question_id)
    if answer.value is AnswerValue.NOT_APPLICABLE and not answer.note.strip():
        raise MissingJustification(answer.question_id)
    updated = dict(answers)
    updated[answer.question_id] = answer
    return updated


def score_criteria(
    answers: Mapping[str, Answer], catalog: Catalog, d: DriverSet
) -> list[CriterionRelevance]:
    """One relevance entry per criterion that has at least one applicable question.

    score = max weight over answered, applicable, non-NotApplicable questions;
    a criterion with no such answer is unassessed (score 0, band None).
    """
    applicable = applicable_questions(catalog, d)
    by_criterion: dict[str, list] = {}
    for question in applicable:
        by_criterion.setdefault(question.criterion_id, []).append(question)

    results: list[CriterionRelevance] = []
    for criterion in catalog.criteria:
        questions = by_criterion.get(criterion.id)
        if not questions:
            continue
        weighted: dict[str, int] = {}
        for question in questions:
            answer = answers.get(question.id)
            if answer is None or answer.value is AnswerValue.NOT_APPLICABLE:
                continue
            weighted[question.id] = question.weights[answer.value]
        if not weighted:
            results.append(
                CriterionRelevance(
                    criterion_id=criterion.id,
                    score=0,
                    band=RelevanceBand.NONE,
                    contributing_question_ids=(),
                    unassessed=True,
                )
            )
            continue
        score = max(weighted.values())
        contributing = tuple(sorted(qid for qid, w in weighted.items() if w == score))
        results.append(
            CriterionRelevance(
                criterion_id=criterion.id,
                score=score,
                band=BAND_BY_SCORE[score],
                contributing_question_ids=contributing,
                unassessed=False,
            )
        )
    return results


def phase1_complete(
    answers: Mapping[str, Answer], catalog: Catalog, d: DriverSet
) -> GateDecision:
    """The Phase 1 gate: requires every applicable question answered.

    Returns the advancing criterion ids plus, for every other criterion in
    the catalog, the reason it was excluded from Phase 2.
    """
    applicable = applicable_questions(catalog, d)
    unanswered = [q.id for q in applicable if q.id not in answers]
    if unanswered:
        raise IncompletePhase("phase1", unanswered)

    scores = score_criteria(answers, catalog, d)
    advancing = advancing_criteria(scores, catalog.thresholds)
    scored_ids = {s.criterion_id: s for s in scores}

    excluded: dict[str, str] = {}
    for criterion in catalog.criteria:
        if criterion.id in advancing:
            continue
        entry = scored_ids.get(criterion.id)
        if entry is None:
            excluded[criterion.id] = REASON_NO_APPLICABLE_QUESTIONS
        elif entry.unassessed:
            excluded[criterion.id] = REASON_UNASSESSED
        else:
            excluded[criterion.id] = REASON_BELOW_THRESHOLD
    return GateDecision(advancing=tuple(sorted(advancing)), excluded=excluded)


def answer_to_json(answer: Answer) -> dict:
    return {
        "question_id": answer.question_id,
        "value": answer.value.value,
        "note": answer.note,
        "evidence_refs": list(answer.evidence_refs),
        "respondent": stakeholder_to_json(answer.respondent),
        "answered_at": answer.answered_at,
    }


def answer_from_json(value: Any, path: str = "answer") -> Answer:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj, {"question_id", "value", "note", "evidence_refs", "respondent", "answered_at"}, path
    )
    raw_value = require_string(get_required(obj, "value", path), f"{path}.value")
    try:
        answer_value = AnswerValue(raw_value)
    except ValueError:
        raise SchemaError(f"{path}.value", f"unknown answer value {raw_value!r}") from None
    return Answer(
        question_id=require_string(get_required(obj, "question_id", path), f"{path}.question_id"),
        value=answer_value,
        note=require_string(obj.get("note", ""), f"{path}.note"),
        evidence_refs=tuple(
            require_string_array(obj.get("evidence_refs", []), f"{path}.evidence_refs")
        ),
        respondent=stakeholder_from_json(
            get_required(obj, "respondent", path), f"{path}.respondent"
        ),
        answered_at=require_string(obj.get("answered_at", ""), f"{path}.answered_at"),
    )
