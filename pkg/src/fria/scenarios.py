"""Phase 2: impact scenarios, four-dimension scoring and classification.

Each advancing criterion gets one scenario instance per applicable template.
The responsible stakeholder scores four dimensions (effect on individuals,
effect on society, mitigation effort, duration of the effect) on a 0..3
ordinal scale and assesses existing controls. Classification works on the
residual impact:

    base     = max of the four dimension scores
    credit   = 2 for Effective controls, 1 for PartiallyEffective, else 0
    residual = max(0, base - credit)

    residual >= 2 -> Relevant
    residual == 1 -> PartiallyRelevant
    residual == 0 -> Irrelevant

Significance is orthogonal: a scenario is significant when any configured
significance dimension (by default effect on individuals or on society)
meets the configured minimum. Claimed control effectiveness requires
evidence references; computed classifications can be overridden with a
recorded rationale, never silently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Iterable, Optional

from .catalog import Catalog, Thresholds
from .errors import (
    EvidenceRequired,
    MissingRationale,
    NoScenarioApplicable,
    SchemaError,
)
from .filtering import evaluate_predicate
from .jsoncheck import (
    get_required,
    reject_unknown_keys,
    require_int,
    require_object,
    require_string,
    require_string_array,
)
from .profile import DriverSet, StakeholderRef, stakeholder_from_json, stakeholder_to_json


class Classification(str, Enum):
    RELEVANT = "Relevant"
    PARTIALLY_RELEVANT = "PartiallyRelevant"
    IRRELEVANT = "Irrelevant"


# Total order used when folding scenario classifications into a criterion verdict.
CLASSIFICATION_RANK = {
    Classification.IRRELEVANT: 0,
    Classification.PARTIALLY_RELEVANT: 1,
    Classification.RELEVANT: 2,
}


class ControlEffectiveness(str, Enum):
    EFFECTIVE = "Effective"
    PARTIALLY_EFFECTIVE = "PartiallyEffective"
    INEFFECTIVE = "Ineffective"
    ABSENT = "Absent"


MITIGATION_CREDIT = {
    ControlEffectiveness.EFFECTIVE: 2,
    ControlEffectiveness.PARTIALLY_EFFECTIVE: 1,
    ControlEffectiveness.INEFFECTIVE: 0,
    ControlEffectiveness.ABSENT: 0,
}

DIMENSION_NAMES = ("individuals", "society", "mitigation_effort", "duration")


@dataclass(frozen=True)
class DimensionScores:
    individuals: int
    society: int
    mitigation_effort: int
    duration: int

    def __post_init__(self):
        for name in DIMENSION_NAMES:
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 3:
                raise SchemaError(f"dimensions.{name}", f"score {value!r} outside 0..3")

    def base(self) -> int:
        return max(self.individuals, self.society, self.mitigation_effort, self.duration)


@dataclass(frozen=True)
class ControlAssessment:
    effectiveness: ControlEffectiveness
    evidence_refs: tuple[str, ...] = ()
    control_owner: StakeholderRef = StakeholderRef(name="", role="unspecified")


@dataclass(frozen=True)
class Override:
    """Manual correction of the computed outcome; always carries a rationale."""

    rationale: str
    actor: StakeholderRef
    classification: Optional[Classification] = None
    significant: Optional[bool] = None


@dataclass(frozen=True)
class ScenarioInstance:
    id: str
    template_id: str
    criterion_id: str
    narrative: str
    assigned_to: StakeholderRef


@dataclass(frozen=True)
class ScenarioEvaluation:
    scenario_id: str
    dimensions: DimensionScores
    control: ControlAssessment
    classification: Classification
    significant: bool
    rationale: str
    override: Optional[Override] = None


@dataclass(frozen=True)
class CriterionFinalClassification:
    criterion_id: str
    classification: Classification
    scenario_ids: tuple[str, ...]


def classify(
    dim: DimensionScores, ctrl: ControlAssessment, t: Thresholds
) -> tuple[Classification, bool]:
    base = dim.base()
    residual = max(0, base - MITIGATION_CREDIT[ctrl.effectiveness])
    if residual >= 2:
        classification = Classification.RELEVANT
    elif residual == 1:
        classification = Classification.PARTIALLY_RELEVANT
    else:
        classification = Classification.IRRELEVANT
    significant = any(
        getattr(dim, name) >= t.significance_dimension_min
        for name in t.significance_dimensions
    )
    return classification, significant


def instantiate_scenarios(
    advancing: Iterable[str], catalog: Catalog, d: DriverSet
) -> list[ScenarioInstance]:
    """One instance per driver-applicable template of each advancing criterion.

    An advancing criterion with zero applicable templates is an error, not a
    silent drop: somebody decided this criterion matters and nothing covers it.
    """
    criteria = catalog.criteria_by_id()
    instances: list[ScenarioInstance] = []
    for criterion_id in sorted(advancing):
        criterion = criteria[criterion_id]
        passing = [
            t
            for t in catalog.templates_of(criterion_id)
            if evaluate_predicate(t.applicability, d)
        ]
        if not passing:
            raise NoScenarioApplicable(criterion_id)
        for template in passing:
            instances.append(
                ScenarioInstance(
                    id=template.id,
                    template_id=template.id,
                    criterion_id=criterion_id,
                    narrative=template.narrative,
                    assigned_to=StakeholderRef(name="", role=criterion.stakeholder_role or "unspecified"),
                )
            )
    return instances


def make_evaluation(
    instance: ScenarioInstance,
    dim: DimensionScores,
    ctrl: ControlAssessment,
    rationale: str,
    t: Thresholds,
) -> ScenarioEvaluation:
    if not rationale.strip():
        raise MissingRationale(f"evaluation of {instance.id}")
    if (
        ctrl.effectiveness
        in (ControlEffectiveness.EFFECTIVE, ControlEffectiveness.PARTIALLY_EFFECTIVE)
        and not ctrl.evidence_refs
    ):
        raise EvidenceRequired(instance.id)
    classification, significant = classify(dim, ctrl, t)
    return ScenarioEvaluation(
        scenario_id=instance.id,
        dimensions=dim,
        control=ctrl,
        classification=classification,
        significant=significant,
        rationale=rationale,
    )


def apply_override(
    evaluation: ScenarioEvaluation,
    rationale: str,
    actor: StakeholderRef,
    classification: Optional[Classification] = None,
    significant: Optional[bool] = None,
) -> ScenarioEvaluation:
    """Replace the computed outcome, keeping dimensions and control untouched."""
    if not rationale.strip():
        raise MissingRationale(f"override of {evaluation.scenario_id}")
    override = Override(
        rationale=rationale, actor=actor, classification=classification, significant=significant
    )
    return replace(
        evaluation,
        classification=classification if classification is not None else evaluation.classification,
        significant=significant if significant is not None else evaluation.significant,
        override=override,
    )


def finalize_criterion(
    criterion_id: str, evals: Iterable[ScenarioEvaluation]
) -> CriterionFinalClassification:
    """Fold scenario outcomes into the criterion verdict: worst one wins."""
    evals = sorted(evals, key=lambda e: e.scenario_id)
    if not evals:
        raise ValueError(f"criterion {criterion_id} has no evaluations to finalize")
    worst = max(evals, key=lambda e: CLASSIFICATION_RANK[e.classification])
    return CriterionFinalClassification(
        criterion_id=criterion_id,
        classification=worst.classification,
        scenario_ids=tuple(e.scenario_id for e in evals),
    )


# ---------------------------------------------------------------------------
# JSON forms
# ---------------------------------------------------------------------------


def dimensions_to_json(dim: DimensionScores) -> dict:
    return {name: getattr(dim, name) for name in DIMENSION_NAMES}


def dimensions_from_json(value: Any, path: str = "dimensions") -> DimensionScores:
    obj = require_object(value, path)
    reject_unknown_keys(obj, set(DIMENSION_NAMES), path)
    scores = {
        name: require_int(get_required(obj, name, path), f"{path}.{name}")
        for name in DIMENSION_NAMES
    }
    return DimensionScores(**scores)


def control_to_json(ctrl: ControlAssessment) -> dict:
    return {
        "effectiveness": ctrl.effectiveness.value,
        "evidence_refs": list(ctrl.evidence_refs),
        "control_owner": stakeholder_to_json(ctrl.control_owner),
    }


def control_from_json(value: Any, path: str = "control") -> ControlAssessment:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"effectiveness", "evidence_refs", "control_owner"}, path)
    raw = require_string(get_required(obj, "effectiveness", path), f"{path}.effectiveness")
    try:
        effectiveness = ControlEffectiveness(raw)
    except ValueError:
        raise SchemaError(f"{path}.effectiveness", f"unknown effectiveness {raw!r}") from None
    owner = obj.get("control_owner")
    return ControlAssessment(
        effectiveness=effectiveness,
        evidence_refs=tuple(
            require_string_array(obj.get("evidence_refs", []), f"{path}.evidence_refs")
        ),
        control_owner=stakeholder_from_json(owner, f"{path}.control_owner")
        if owner is not None
        else StakeholderRef(name="", role="unspecified"),
    )


def instance_to_json(instance: ScenarioInstance) -> dict:
    return {
        "id": instance.id,
        "template_id": instance.template_id,
        "criterion_id": instance.criterion_id,
        "narrative": instance.narrative,
        "assigned_to": stakeholder_to_json(instance.assigned_to),
    }


def instance_from_json(value: Any, path: str = "scenario") -> ScenarioInstance:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"id", "template_id", "criterion_id", "narrative", "assigned_to"}, path)
    return ScenarioInstance(
        id=require_string(get_required(obj, "id", path), f"{path}.id"),
        template_id=require_string(get_required(obj, "template_id", path), f"{path}.template_id"),
        criterion_id=require_string(
            get_required(obj, "criterion_id", path), f"{path}.criterion_id"
        ),
        narrative=require_string(obj.get("narrative", ""), f"{path}.narrative"),
        assigned_to=stakeholder_from_json(
            get_required(obj, "assigned_to", path), f"{path}.assigned_to"
        ),
    )


def override_to_json(override: Override) -> dict:
    return {
        "rationale": override.rationale,
        "actor": stakeholder_to_json(override.actor),
        "classification": override.classification.value if override.classification else None,
        "significant": override.significant,
    }


def override_from_json(value: Any, path: str) -> Override:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"rationale", "actor", "classification", "significant"}, path)
    raw_cls = obj.get("classification")
    classification = None
    if raw_cls is not None:
        classification = _parse_classification(raw_cls, f"{path}.classification")
    significant = obj.get("significant")
    if significant is not None and not isinstance(significant, bool):
        raise SchemaError(f"{path}.significant", "expected a boolean")
    return Override(
        rationale=require_string(get_required(obj, "rationale", path), f"{path}.rationale"),
        actor=stakeholder_from_json(get_required(obj, "actor", path), f"{path}.actor"),
        classification=classification,
        significant=significant,
    )


def evaluation_to_json(ev: ScenarioEvaluation) -> dict:
    return {
        "scenario_id": ev.scenario_id,
        "dimensions": dimensions_to_json(ev.dimensions),
        "control": control_to_json(ev.control),
        "classification": ev.classification.value,
        "significant": ev.significant,
        "rationale": ev.rationale,
        "override": override_to_json(ev.override) if ev.override else None,
    }


def evaluation_from_json(value: Any, path: str = "evaluation") -> ScenarioEvaluation:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj,
        {"scenario_id", "dimensions", "control", "classification", "significant", "rationale", "override"},
        path,
    )
    significant = get_required(obj, "significant", path)
    if not isinstance(significant, bool):
        raise SchemaError(f"{path}.significant", "expected a boolean")
    raw_override = obj.get("override")
    return ScenarioEvaluation(
        scenario_id=require_string(get_required(obj, "scenario_id", path), f"{path}.scenario_id"),
        dimensions=dimensions_from_json(get_required(obj, "dimensions", path), f"{path}.dimensions"),
        control=control_from_json(get_required(obj, "control", path), f"{path}.control"),
        classification=_parse_classification(
            get_required(obj, "classification", path), f"{path}.classification"
        ),
        significant=significant,
        rationale=require_string(obj.get("rationale", ""), f"{path}.rationale"),
        override=override_from_json(raw_override, f"{path}.override") if raw_override else None,
    )


def _parse_classification(value: Any, path: str) -> Classification:
    raw = require_string(value, path)
    try:
        return Classification(raw)
    except ValueError:
        raise SchemaError(path, f"unknown classification {raw!r}") from None
