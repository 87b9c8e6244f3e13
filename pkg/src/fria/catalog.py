"""The assessment catalog: the declarative definition of what gets assessed.

A catalog bundles impact domains, guiding criteria mapped to fundamental
rights, checklist questions with applicability predicates, scenario
templates, and the gate thresholds. Catalogs are plain JSON documents so
they stay diffable and auditable; parsing is strict (unknown fields are
rejected) so the parser accepts exactly the language the canonical
serializer emits.

Parsing enforces structure and reference resolution; semantic invariants
(uniqueness, cardinality, ranges) are reported by validate_catalog as
findings rather than raised, so a review tool can list every problem at
once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

from .canonical import canonical_bytes
from .errors import CatalogSyntaxError, SchemaError, UnsupportedVersion
from .jsoncheck import (
    get_required,
    reject_unknown_keys,
    require_array,
    require_int,
    require_nonempty_string,
    require_object,
    require_string,
    require_string_array,
)
from .profile import LifecycleStage

SUPPORTED_SCHEMA_VERSIONS = ("1",)

SIGNIFICANCE_DIMENSIONS = ("individuals", "society")


class AnswerValue(str, Enum):
    ADEQUATE = "Adequate"
    PARTIAL = "Partial"
    INADEQUATE = "Inadequate"
    NOT_APPLICABLE = "NotApplicable"


# Answer values that carry relevance weight; NotApplicable never contributes.
WEIGHTED_VALUES = (AnswerValue.ADEQUATE, AnswerValue.PARTIAL, AnswerValue.INADEQUATE)

DEFAULT_WEIGHTS = {
    AnswerValue.ADEQUATE: 0,
    AnswerValue.PARTIAL: 1,
    AnswerValue.INADEQUATE: 2,
}


@dataclass(frozen=True)
class ApplicabilityPredicate:
    """Driver-based selection clauses; an empty any-of set imposes no constraint."""

    lifecycle_any_of: frozenset[LifecycleStage] = frozenset()
    domain_flags_any_of: frozenset[str] = frozenset()
    domain_flags_forbidden: frozenset[str] = frozenset()
    system_types_any_of: frozenset[str] = frozenset()

    def is_vacuous(self) -> bool:
        return not (
            self.lifecycle_any_of
            or self.domain_flags_any_of
            or self.domain_flags_forbidden
            or self.system_types_any_of
        )


@dataclass(frozen=True)
class ImpactDomain:
    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class GuidingCriterion:
    id: str
    domain_id: str
    name: str
    rights_refs: tuple[str, ...]
    stakeholder_role: str


@dataclass(frozen=True)
class ChecklistQuestion:
    id: str
    criterion_id: str
    text: str
    applicability: ApplicabilityPredicate
    stakeholder_role: str
    weights: Mapping[AnswerValue, int]


@dataclass(frozen=True)
class ScenarioTemplate:
    id: str
    criterion_id: str
    narrative: str
    applicability: ApplicabilityPredicate


@dataclass(frozen=True)
class Thresholds:
    phase1_advance_min: int = 2
    significance_dimension_min: int = 2
    significance_dimensions: tuple[str, ...] = SIGNIFICANCE_DIMENSIONS


@dataclass(frozen=True)
class Catalog:
    schema_version: str
    domains: tuple[ImpactDomain, ...]
    criteria: tuple[GuidingCriterion, ...]
    questions: tuple[ChecklistQuestion, ...]
    scenario_templates: tuple[ScenarioTemplate, ...]
    thresholds: Thresholds

    def __post_init__(self):
        # Normalize to canonical (id-sorted) order so equal content compares
        # equal and "catalog order" is well defined.
        for name in ("domains", "criteria", "questions", "scenario_templates"):
            object.__setattr__(
                self, name, tuple(sorted(getattr(self, name), key=lambda item: item.id))
            )

    def domains_by_id(self) -> dict[str, ImpactDomain]:
        return {d.id: d for d in self.domains}

    def criteria_by_id(self) -> dict[str, GuidingCriterion]:
        return {c.id: c for c in self.criteria}

    def questions_by_id(self) -> dict[str, ChecklistQuestion]:
        return {q.id: q for q in self.questions}

    def templates_by_id(self) -> dict[str, ScenarioTemplate]:
        return {t.id: t for t in self.scenario_templates}

    def questions_of(self, criterion_id: str) -> tuple[ChecklistQuestion, ...]:
        return tuple(q for q in self.questions if q.criterion_id == criterion_id)

    def templates_of(self, criterion_id: str) -> tuple[ScenarioTemplate, ...]:
        return tuple(t for t in self.scenario_templates if t.criterion_id == criterion_id)


@dataclass(frozen=True)
class Finding:
    path: str
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

TOP_LEVEL_KEYS = {
    "schema_version",
    "domains",
    "criteria",
    "questions",
    "scenario_templates",
    "thresholds",
}


def parse_catalog(document: bytes) -> Catalog:
    try:
        raw = json.loads(document.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise CatalogSyntaxError(exc.start, "invalid UTF-8") from exc
    except json.JSONDecodeError as exc:
        raise CatalogSyntaxError(exc.pos, exc.msg) from exc

    obj = require_object(raw, "$")
    for key in TOP_LEVEL_KEYS:
        get_required(obj, key, "$")
    reject_unknown_keys(obj, TOP_LEVEL_KEYS, "$")

    version = require_string(obj["schema_version"], "$.schema_version")
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        raise UnsupportedVersion(version)

    domains = tuple(
        _parse_domain(item, f"$.domains[{i}]")
        for i, item in enumerate(require_array(obj["domains"], "$.domains"))
    )
    criteria = tuple(
        _parse_criterion(item, f"$.criteria[{i}]")
        for i, item in enumerate(require_array(obj["criteria"], "$.criteria"))
    )
    questions = tuple(
        _parse_question(item, f"$.questions[{i}]")
        for i, item in enumerate(require_array(obj["questions"], "$.questions"))
    )
    templates = tuple(
        _parse_template(item, f"$.scenario_templates[{i}]")
        for i, item in enumerate(
            require_array(obj["scenario_templates"], "$.scenario_templates")
        )
    )
    thresholds = _parse_thresholds(obj["thresholds"], "$.thresholds")

    _resolve_references(domains, criteria, questions, templates)
    return Catalog(
        schema_version=version,
        domains=domains,
        criteria=criteria,
        questions=questions,
        scenario_templates=templates,
        thresholds=thresholds,
    )


def _parse_domain(value: Any, path: str) -> ImpactDomain:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"id", "name", "description"}, path)
    return ImpactDomain(
        id=require_nonempty_string(get_required(obj, "id", path), f"{path}.id"),
        name=require_string(get_required(obj, "name", path), f"{path}.name"),
        description=require_string(obj.get("description", ""), f"{path}.description"),
    )


def _parse_criterion(value: Any, path: str) -> GuidingCriterion:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"id", "domain_id", "name", "rights_refs", "stakeholder_role"}, path)
    return GuidingCriterion(
        id=require_nonempty_string(get_required(obj, "id", path), f"{path}.id"),
        domain_id=require_nonempty_string(
            get_required(obj, "domain_id", path), f"{path}.domain_id"
        ),
        name=require_string(get_required(obj, "name", path), f"{path}.name"),
        rights_refs=tuple(
            require_string_array(get_required(obj, "rights_refs", path), f"{path}.rights_refs")
        ),
        stakeholder_role=require_string(
            get_required(obj, "stakeholder_role", path), f"{path}.stakeholder_role"
        ),
    )


def _parse_question(value: Any, path: str) -> ChecklistQuestion:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj, {"id", "criterion_id", "text", "applicability", "stakeholder_role", "weights"}, path
    )
    return ChecklistQuestion(
        id=require_nonempty_string(get_required(obj, "id", path), f"{path}.id"),
        criterion_id=require_nonempty_string(
            get_required(obj, "criterion_id", path), f"{path}.criterion_id"
        ),
        text=require_string(get_required(obj, "text", path), f"{path}.text"),
        applicability=predicate_from_json(obj.get("applicability", {}), f"{path}.applicability"),
        stakeholder_role=require_string(
            obj.get("stakeholder_role", ""), f"{path}.stakeholder_role"
        ),
        weights=_parse_weights(obj.get("weights"), f"{path}.weights"),
    )


def _parse_template(value: Any, path: str) -> ScenarioTemplate:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"id", "criterion_id", "narrative", "applicability"}, path)
    return ScenarioTemplate(
        id=require_nonempty_string(get_required(obj, "id", path), f"{path}.id"),
        criterion_id=require_nonempty_string(
            get_required(obj, "criterion_id", path), f"{path}.criterion_id"
        ),
        narrative=require_string(get_required(obj, "narrative", path), f"{path}.narrative"),
        applicability=predicate_from_json(obj.get("applicability", {}), f"{path}.applicability"),
    )


def _parse_weights(value: Any, path: str) -> dict[AnswerValue, int]:
    if value is None:
        return dict(DEFAULT_WEIGHTS)
    obj = require_object(value, path)
    weights: dict[AnswerValue, int] = {}
    for key, raw in obj.items():
        try:
            answer = AnswerValue(key)
        except ValueError:
            raise SchemaError(f"{path}.{key}", "unknown answer value") from None
        if answer not in WEIGHTED_VALUES:
            raise SchemaError(f"{path}.{key}", "NotApplicable cannot carry weight")
        weights[answer] = require_int(raw, f"{path}.{key}")
    return weights


def _parse_thresholds(value: Any, path: str) -> Thresholds:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj,
        {"phase1_advance_min", "significance_dimension_min", "significance_dimensions"},
        path,
    )
    dims = obj.get("significance_dimensions")
    if dims is None:
        parsed_dims = SIGNIFICANCE_DIMENSIONS
    else:
        names = require_string_array(dims, f"{path}.significance_dimensions")
        for i, name in enumerate(names):
            if name not in SIGNIFICANCE_DIMENSIONS:
                raise SchemaError(
                    f"{path}.significance_dimensions[{i}]", f"unknown dimension {name!r}"
                )
        parsed_dims = tuple(sorted(set(names)))
    return Thresholds(
        phase1_advance_min=require_int(
            obj.get("phase1_advance_min", 2), f"{path}.phase1_advance_min"
        ),
        significance_dimension_min=require_int(
            obj.get("significance_dimension_min", 2), f"{path}.significance_dimension_min"
        ),
        significance_dimensions=parsed_dims,
    )


def predicate_from_json(value: Any, path: str) -> ApplicabilityPredicate:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj,
        {
            "lifecycle_any_of",
            "domain_flags_any_of",
            "domain_flags_forbidden",
            "system_types_any_of",
        },
        path,
    )
    stages = []
    for i, name in enumerate(
        require_string_array(obj.get("lifecycle_any_of", []), f"{path}.lifecycle_any_of")
    ):
        try:
            stages.append(LifecycleStage(name))
        except ValueError:
            raise SchemaError(
                f"{path}.lifecycle_any_of[{i}]", f"unknown lifecycle stage {name!r}"
            ) from None
    return ApplicabilityPredicate(
        lifecycle_any_of=frozenset(stages),
        domain_flags_any_of=frozenset(
            require_string_array(obj.get("domain_flags_any_of", []), f"{path}.domain_flags_any_of")
        ),
        domain_flags_forbidden=frozenset(
            require_string_array(
                obj.get("domain_flags_forbidden", []), f"{path}.domain_flags_forbidden"
            )
        ),
        system_types_any_of=frozenset(
            require_string_array(obj.get("system_types_any_of", []), f"{path}.system_types_any_of")
        ),
    )


def _resolve_references(domains, criteria, questions, templates) -> None:
    domain_ids = {d.id for d in domains}
    criterion_ids = {c.id for c in criteria}
    for i, criterion in enumerate(criteria):
        if criterion.domain_id not in domain_ids:
            raise SchemaError(
                f"$.criteria[{i}].domain_id", f"unknown domain {criterion.domain_id!r}"
            )
    for i, question in enumerate(questions):
        if question.criterion_id not in criterion_ids:
            raise SchemaError(
                f"$.questions[{i}].criterion_id", f"unknown criterion {question.criterion_id!r}"
            )
    for i, template in enumerate(templates):
        if template.criterion_id not in criterion_ids:
            raise SchemaError(
                f"$.scenario_templates[{i}].criterion_id",
                f"unknown criterion {template.criterion_id!r}",
            )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def predicate_to_json(pred: ApplicabilityPredicate) -> dict:
    return {
        "lifecycle_any_of": sorted(stage.value for stage in pred.lifecycle_any_of),
        "domain_flags_any_of": sorted(pred.domain_flags_any_of),
        "domain_flags_forbidden": sorted(pred.domain_flags_forbidden),
        "system_types_any_of": sorted(pred.system_types_any_of),
    }


def catalog_to_json(catalog: Catalog) -> dict:
    return {
        "schema_version": catalog.schema_version,
        "domains": [
            {"id": d.id, "name": d.name, "description": d.description} for d in catalog.domains
        ],
        "criteria": [
            {
                "id": c.id,
                "domain_id": c.domain_id,
                "name": c.name,
                "rights_refs": list(c.rights_refs),
                "stakeholder_role": c.stakeholder_role,
            }
            for c in catalog.criteria
        ],
        "questions": [
            {
                "id": q.id,
                "criterion_id": q.criterion_id,
                "text": q.text,
                "applicability": predicate_to_json(q.applicability),
                "stakeholder_role": q.stakeholder_role,
                "weights": {v.value: w for v, w in sorted(q.weights.items())},
            }
            for q in catalog.questions
        ],
        "scenario_templates": [
            {
                "id": t.id,
                "criterion_id": t.criterion_id,
                "narrative": t.narrative,
                "applicability": predicate_to_json(t.applicability),
            }
            for t in catalog.scenario_templates
        ],
        "thresholds": {
            "phase1_advance_min": catalog.thresholds.phase1_advance_min,
            "significance_dimension_min": catalog.thresholds.significance_dimension_min,
            "significance_dimensions": sorted(catalog.thresholds.significance_dimensions),
        },
    }


def canonical_serialize(catalog: Catalog) -> bytes:
    return canonical_bytes(catalog_to_json(catalog))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_catalog(catalog: Catalog) -> ValidationReport:
    findings: list[Finding] = []

    def flag(path: str, rule: str, message: str) -> None:
        findings.append(Finding(path=path, rule=rule, message=message))

    for kind, items in (
        ("domains", catalog.domains),
        ("criteria", catalog.criteria),
        ("questions", catalog.questions),
        ("scenario_templates", catalog.scenario_templates),
    ):
        seen: list[str] = []
        for i, item in enumerate(items):
            if item.id in seen:
                flag(f"{kind}[{i}].id", "duplicate-id", f"id {item.id!r} already declared")
            seen.append(item.id)

    domain_ids = {d.id for d in catalog.domains}
    criterion_ids = {c.id for c in catalog.criteria}

    for i, domain in enumerate(catalog.domains):
        if not domain.name:
            flag(f"domains[{i}].name", "empty-name", "domain name must not be empty")

    questions_per_criterion: dict[str, int] = {}
    templates_per_criterion: dict[str, int] = {}
    for question in catalog.questions:
        questions_per_criterion[question.criterion_id] = (
            questions_per_criterion.get(question.criterion_id, 0) + 1
        )
    for template in catalog.scenario_templates:
        templates_per_criterion[template.criterion_id] = (
            templates_per_criterion.get(template.criterion_id, 0) + 1
        )

    for i, criterion in enumerate(catalog.criteria):
        if criterion.domain_id not in domain_ids:
            flag(
                f"criteria[{i}].domain_id",
                "unresolved-reference",
                f"unknown domain {criterion.domain_id!r}",
            )
        if not criterion.rights_refs:
            flag(
                f"criteria[{i}].rights_refs",
                "criterion-needs-rights",
                "criterion must reference at least one fundamental right",
            )
        if not questions_per_criterion.get(criterion.id):
            flag(
                f"criteria[{i}]",
                "criterion-needs-question",
                f"criterion {criterion.id!r} has no checklist question",
            )
        if not templates_per_criterion.get(criterion.id):
            flag(
                f"criteria[{i}]",
                "criterion-needs-scenario",
                f"criterion {criterion.id!r} has no scenario template",
            )

    for i, question in enumerate(catalog.questions):
        if question.criterion_id not in criterion_ids:
            flag(
                f"questions[{i}].criterion_id",
                "unresolved-reference",
                f"unknown criterion {question.criterion_id!r}",
            )
        for value in WEIGHTED_VALUES:
            if value not in question.weights:
                flag(
                    f"questions[{i}].weights",
                    "weights-incomplete",
                    f"missing weight for {value.value}",
                )
        for value, weight in sorted(question.weights.items()):
            if not 0 <= weight <= 2:
                flag(
                    f"questions[{i}].weights.{value.value}",
                    "weight-out-of-range",
                    f"weight {weight} outside 0..2",
                )
        findings.extend(_predicate_findings(question.applicability, f"questions[{i}].applicability"))

    for i, template in enumerate(catalog.scenario_templates):
        if template.criterion_id not in criterion_ids:
            flag(
                f"scenario_templates[{i}].criterion_id",
                "unresolved-reference",
                f"unknown criterion {template.criterion_id!r}",
            )
        if not template.narrative:
            flag(
                f"scenario_templates[{i}].narrative",
                "empty-narrative",
                "scenario narrative must not be empty",
            )
        findings.extend(
            _predicate_findings(template.applicability, f"scenario_templates[{i}].applicability")
        )

    thresholds = catalog.thresholds
    if not 0 <= thresholds.phase1_advance_min <= 2:
        flag(
            "thresholds.phase1_advance_min",
            "threshold-out-of-range",
            f"{thresholds.phase1_advance_min} outside 0..2",
        )
    if not 1 <= thresholds.significance_dimension_min <= 3:
        flag(
            "thresholds.significance_dimension_min",
            "threshold-out-of-range",
            f"{thresholds.significance_dimension_min} outside 1..3",
        )

    return ValidationReport(findings=tuple(findings))


def _predicate_findings(pred: ApplicabilityPredicate, path: str) -> list[Finding]:
    overlap = pred.domain_flags_any_of & pred.domain_flags_forbidden
    if overlap:
        return [
            Finding(
                path=path,
                rule="predicate-overlap",
                message=f"flags both required and forbidden: {', '.join(sorted(overlap))}",
            )
        ]
    return []
