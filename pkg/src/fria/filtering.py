"""The gate mechanism: every phase boundary is a filter over explicit inputs.

Three gates, three pure functions. Questions are selected by driver
predicates, criteria advance on their relevance score, and evaluated
scenarios are partitioned into the output buckets. Nothing here holds
state, so callers can re-run a gate at any time and get the same answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TYPE_CHECKING

from .catalog import ApplicabilityPredicate, Catalog, ChecklistQuestion, Thresholds
from .profile import DriverSet

if TYPE_CHECKING:
    from .checklist import CriterionRelevance
    from .scenarios import ScenarioEvaluation


@dataclass(frozen=True)
class OutputPartition:
    """Total, disjoint split of evaluated scenarios at the output gate.

    requires_action: Relevant and significant
    no_action:       Relevant but not significant
    recommended:     PartiallyRelevant (action proposed, not required)
    excluded:        Irrelevant
    """

    requires_action: tuple[str, ...]
    no_action: tuple[str, ...]
    recommended: tuple[str, ...]
    excluded: tuple[str, ...]

    def bucket_of(self, scenario_id: str) -> str:
        for name in ("requires_action", "no_action", "recommended", "excluded"):
            if scenario_id in getattr(self, name):
                return name
        raise KeyError(scenario_id)

    def to_json(self) -> dict:
        return {
            "requires_action": list(self.requires_action),
            "no_action": list(self.no_action),
            "recommended": list(self.recommended),
            "excluded": list(self.excluded),
        }


def evaluate_predicate(pred: ApplicabilityPredicate, d: DriverSet) -> bool:
    """All four clauses must hold; empty any-of sets are vacuously true."""
    if pred.lifecycle_any_of and d.lifecycle_stage not in pred.lifecycle_any_of:
        return False
    if pred.domain_flags_any_of and not (pred.domain_flags_any_of & d.domain_flags):
        return False
    if pred.domain_flags_forbidden & d.domain_flags:
        return False
    if pred.system_types_any_of and not (pred.system_types_any_of & d.system_types):
        return False
    return True


def applicable_questions(catalog: Catalog, d: DriverSet) -> list[ChecklistQuestion]:
    """Questions whose predicate passes, in catalog (id) order."""
    return [q for q in catalog.questions if evaluate_predicate(q.applicability, d)]


def advancing_criteria(scores: Iterable["CriterionRelevance"], t: Thresholds) -> set[str]:
    """Criteria whose relevance score meets the Phase 1 gate.

    Unassessed criteria (no contributing answer) never advance; they are
    surfaced separately rather than treated as compliant.
    """
    return {
        s.criterion_id
        for s in scores
        if not s.unassessed and s.score >= t.phase1_advance_min
    }


def output_scenarios(evals: Iterable["ScenarioEvaluation"]) -> OutputPartition:
    from .scenarios import Classification

    requires_action: list[str] = []
    no_action: list[str] = []
    recommended: list[str] = []
    excluded: list[str] = []
    for ev in sorted(evals, key=lambda e: e.scenario_id):
        if ev.classification is Classification.RELEVANT:
            (requires_action if ev.significant else no_action).append(ev.scenario_id)
        elif ev.classification is Classification.PARTIALLY_RELEVANT:
            recommended.append(ev.scenario_id)
        else:
            excluded.append(ev.scenario_id)
    return OutputPartition(
        requires_action=tuple(requires_action),
        no_action=tuple(no_action),
        recommended=tuple(recommended),
        excluded=tuple(excluded),
    )
