"""The final output: phase tables, chart data, remediation section, exclusions.

A report is a pure projection of an assessment record plus its catalog.
Chart data is emitted as counts, not rendered images; drawing is a consumer
concern. The exclusions trail lists every item a gate filtered out together
with the stage and reason, so nothing vanishes silently between the catalog
and the final tables.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Any, Mapping, Optional

from . import remediation, scenarios
from .canonical import canonical_bytes
from .catalog import Catalog
from .checklist import score_criteria
from .errors import PhaseIncomplete, SchemaError
from .filtering import OutputPartition, applicable_questions, output_scenarios
from .jsoncheck import get_required, reject_unknown_keys, require_object
from .profile import drivers
from .store import AssessmentPhase, AssessmentRecord, GateRecord

REASON_DRIVER_FILTER = "driver filter"
REASON_IRRELEVANT = "classified irrelevant"

STAGE_PHASE1 = "phase1"
STAGE_PHASE2 = "phase2"
STAGE_OUTPUT = "output"


class ReportStatus:
    DRAFT = "Draft"
    FINAL = "Final"


@dataclass(frozen=True)
class Phase1Row:
    criterion_id: str
    criterion_name: str
    domain_id: str
    domain_name: str
    score: int
    band: str
    advancing: bool
    unassessed: bool
    contributing_question_ids: tuple[str, ...]


@dataclass(frozen=True)
class Phase2Row:
    scenario_id: str
    criterion_id: str
    dimensions: Mapping[str, int]
    control_effectiveness: str
    classification: str
    significant: bool
    override: Optional[dict]


@dataclass(frozen=True)
class ExclusionRow:
    item: str
    kind: str
    stage: str
    reason: str


@dataclass(frozen=True)
class AssessmentReport:
    metadata: Mapping[str, Any]
    phase1_table: tuple[Phase1Row, ...]
    phase2_table: tuple[Phase2Row, ...]
    chart_data: Mapping[str, Any]
    remediation_section: Mapping[str, Any]
    exclusions: tuple[ExclusionRow, ...]
    status: str


def build_report(record: AssessmentRecord, catalog: Catalog, issued_at: str) -> AssessmentReport:
    """Assemble the report from a finalized assessment.

    Requires the workflow to have reached the output stage; status is Final
    exactly when every requires_action scenario carries at least one action.
    """
    if record.phase is not AssessmentPhase.OUTPUT:
        raise PhaseIncomplete(record.phase.value)

    driver_set = drivers(record.profile)
    gate = record.phase1_gate or GateRecord()
    evaluations = record.live_evaluations()
    partition = output_scenarios(evaluations.values())
    coverage = remediation.coverage_check(record.ledger, partition)

    phase1_table = _phase1_table(record, catalog, gate, driver_set)
    phase2_table = _phase2_table(record, evaluations)
    exclusions = _exclusions(record, catalog, gate, driver_set, partition)

    status = ReportStatus.FINAL if coverage.complete else ReportStatus.DRAFT
    report = AssessmentReport(
        metadata={
            "assessment_id": record.id,
            "system_name": record.profile.system_name,
            "issued_at": issued_at,
            "catalog_schema_version": catalog.schema_version,
            "thresholds": {
                "phase1_advance_min": catalog.thresholds.phase1_advance_min,
                "significance_dimension_min": catalog.thresholds.significance_dimension_min,
                "significance_dimensions": sorted(catalog.thresholds.significance_dimensions),
            },
        },
        phase1_table=phase1_table,
        phase2_table=phase2_table,
        chart_data={},
        remediation_section={
            "actions": [remediation.action_to_json(a) for a in record.ledger.actions],
            "coverage": {sid: list(ids) for sid, ids in record.ledger.coverage().items()},
            "required_scenarios": list(partition.requires_action),
            "recommended_scenarios": list(partition.recommended),
            "uncovered_required": list(coverage.uncovered_required),
        },
        exclusions=exclusions,
        status=status,
    )
    return AssessmentReport(
        metadata=report.metadata,
        phase1_table=report.phase1_table,
        phase2_table=report.phase2_table,
        chart_data=chart_counts(report),
        remediation_section=report.remediation_section,
        exclusions=report.exclusions,
        status=report.status,
    )


def _phase1_table(
    record: AssessmentRecord, catalog: Catalog, gate: GateRecord, driver_set
) -> tuple[Phase1Row, ...]:
    domains = catalog.domains_by_id()
    scores = {
        s.criterion_id: s for s in score_criteria(record.answers, catalog, driver_set)
    }
    advancing = set(gate.advancing)
    rows = []
    for criterion in catalog.criteria:
        entry = scores.get(criterion.id)
        if entry is None:
            continue  # no applicable question: listed in exclusions instead
        domain = domains[criterion.domain_id]
        rows.append(
            Phase1Row(
                criterion_id=criterion.id,
                criterion_name=criterion.name,
                domain_id=domain.id,
                domain_name=domain.name,
                score=entry.score,
                band=entry.band.value,
                advancing=criterion.id in advancing,
                unassessed=entry.unassessed,
                contributing_question_ids=entry.contributing_question_ids,
            )
        )
    return tuple(rows)


def _phase2_table(
    record: AssessmentRecord, evaluations: Mapping[str, scenarios.ScenarioEvaluation]
) -> tuple[Phase2Row, ...]:
    rows = []
    for instance in sorted(record.scenarios, key=lambda s: s.id):
        evaluation = evaluations.get(instance.id)
        if evaluation is None:
            continue
        rows.append(
            Phase2Row(
                scenario_id=instance.id,
                criterion_id=instance.criterion_id,
                dimensions=scenarios.dimensions_to_json(evaluation.dimensions),
                control_effectiveness=evaluation.control.effectiveness.value,
                classification=evaluation.classification.value,
                significant=evaluation.significant,
                override=scenarios.override_to_json(evaluation.override)
                if evaluation.override
                else None,
            )
        )
    return tuple(rows)


def _exclusions(
    record: AssessmentRecord,
    catalog: Catalog,
    gate: GateRecord,
    driver_set,
    partition: OutputPartition,
) -> tuple[ExclusionRow, ...]:
    rows: list[ExclusionRow] = []
    applicable_ids = {q.id for q in applicable_questions(catalog, driver_set)}
    for question in catalog.questions:
        if question.id not in applicable_ids:
            rows.append(
                ExclusionRow(
                    item=question.id,
                    kind="question",
                    stage=STAGE_PHASE1,
                    reason=REASON_DRIVER_FILTER,
                )
            )
    for criterion_id, reason in sorted(gate.excluded.items()):
        rows.append(
            ExclusionRow(item=criterion_id, kind="criterion", stage=STAGE_PHASE2, reason=reason)
        )
    instantiated = {s.template_id for s in record.scenarios}
    for criterion_id in gate.advancing:
        for template in catalog.templates_of(criterion_id):
            if template.id not in instantiated:
                rows.append(
                    ExclusionRow(
                        item=template.id,
                        kind="scenario_template",
                        stage=STAGE_PHASE2,
                        reason=REASON_DRIVER_FILTER,
                    )
                )
    for scenario_id in partition.excluded:
        rows.append(
            ExclusionRow(
                item=scenario_id, kind="scenario", stage=STAGE_OUTPUT, reason=REASON_IRRELEVANT
            )
        )
    rows.sort(key=lambda r: (r.stage, r.kind, r.item))
    return tuple(rows)


def chart_counts(report: AssessmentReport) -> dict:
    """Chart data as pure aggregation of the tables: per-domain scenario
    classification counts plus per-band criterion counts."""
    domain_of = {r.criterion_id: r.domain_name for r in report.phase1_table}
    by_domain: dict[str, dict[str, int]] = {}
    for row in report.phase2_table:
        domain_name = domain_of[row.criterion_id]
        bucket = by_domain.setdefault(domain_name, {})
        bucket[row.classification] = bucket.get(row.classification, 0) + 1
    band_counts = {"None": 0, "Moderate": 0, "High": 0}
    for row in report.phase1_table:
        band_counts[row.band] += 1
    return {
        "scenario_classifications_by_domain": {
            name: dict(sorted(counts.items())) for name, counts in sorted(by_domain.items())
        },
        "criterion_band_counts": band_counts,
    }


# ---------------------------------------------------------------------------
# JSON form and round trip
# ---------------------------------------------------------------------------


def report_to_json(report: AssessmentReport) -> dict:
    return {
        "metadata": dict(report.metadata),
        "phase1_table": [
            {
                "criterion_id": r.criterion_id,
                "criterion_name": r.criterion_name,
                "domain_id": r.domain_id,
                "domain_name": r.domain_name,
                "score": r.score,
                "band": r.band,
                "advancing": r.advancing,
                "unassessed": r.unassessed,
                "contributing_question_ids": list(r.contributing_question_ids),
            }
            for r in report.phase1_table
        ],
        "phase2_table": [
            {
                "scenario_id": r.scenario_id,
                "criterion_id": r.criterion_id,
                "dimensions": dict(r.dimensions),
                "control_effectiveness": r.control_effectiveness,
                "classification": r.classification,
                "significant": r.significant,
                "override": r.override,
            }
            for r in report.phase2_table
        ],
        "chart_data": {
            "scenario_classifications_by_domain": {
                k: dict(v)
                for k, v in report.chart_data.get(
                    "scenario_classifications_by_domain", {}
                ).items()
            },
            "criterion_band_counts": dict(report.chart_data.get("criterion_band_counts", {})),
        },
        "remediation_section": dict(report.remediation_section),
        "exclusions": [
            {"item": r.item, "kind": r.kind, "stage": r.stage, "reason": r.reason}
            for r in report.exclusions
        ],
        "status": report.status,
    }


def report_from_json(value: Any, path: str = "report") -> AssessmentReport:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj,
        {
            "metadata",
            "phase1_table",
            "phase2_table",
            "chart_data",
            "remediation_section",
            "exclusions",
            "status",
        },
        path,
    )
    status = get_required(obj, "status", path)
    if status not in (ReportStatus.DRAFT, ReportStatus.FINAL):
        raise SchemaError(f"{path}.status", f"unknown status {status!r}")
    return AssessmentReport(
        metadata=dict(require_object(get_required(obj, "metadata", path), f"{path}.metadata")),
        phase1_table=tuple(
            Phase1Row(
                criterion_id=r["criterion_id"],
                criterion_name=r["criterion_name"],
                domain_id=r["domain_id"],
                domain_name=r["domain_name"],
                score=r["score"],
                band=r["band"],
                advancing=r["advancing"],
                unassessed=r["unassessed"],
                contributing_question_ids=tuple(r["contributing_question_ids"]),
            )
            for r in obj.get("phase1_table", [])
        ),
        phase2_table=tuple(
            Phase2Row(
                scenario_id=r["scenario_id"],
                criterion_id=r["criterion_id"],
                dimensions=dict(r["dimensions"]),
                control_effectiveness=r["control_effectiveness"],
                classification=r["classification"],
                significant=r["significant"],
                override=r.get("override"),
            )
            for r in obj.get("phase2_table", [])
        ),
        chart_data=dict(require_object(get_required(obj, "chart_data", path), f"{path}.chart_data")),
        remediation_section=dict(
            require_object(
                get_required(obj, "remediation_section", path), f"{path}.remediation_section"
            )
        ),
        exclusions=tuple(
            ExclusionRow(item=r["item"], kind=r["kind"], stage=r["stage"], reason=r["reason"])
            for r in obj.get("exclusions", [])
        ),
        status=status,
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------

FORMAT_CANONICAL = "canonical-structured"
FORMAT_CSV = "csv-bundle"
FORMAT_TEXT = "text-summary"

CSV_TABLES = ("phase1", "phase2", "remediation", "exclusions")


def export(report: AssessmentReport, format: str):
    """Export the report: canonical bytes, a csv file bundle, or fixed-width text."""
    if format == FORMAT_CANONICAL:
        return canonical_bytes(report_to_json(report))
    if format == FORMAT_CSV:
        return csv_bundle(report)
    if format == FORMAT_TEXT:
        return text_summary(report).encode("utf-8")
    raise SchemaError("format", f"unknown export format {format!r}")


def _csv_bytes(header: list[str], rows: list[list]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().encode("utf-8")


def _owner_label(owner: Mapping[str, str]) -> str:
    return owner.get("name") or owner.get("role", "")


def csv_bundle(report: AssessmentReport) -> dict[str, bytes]:
    phase1 = _csv_bytes(
        ["criterion", "domain", "score", "band", "advancing", "contributing_questions"],
        [
            [
                r.criterion_id,
                r.domain_name,
                r.score,
                r.band,
                "yes" if r.advancing else "no",
                " ".join(r.contributing_question_ids),
            ]
            for r in report.phase1_table
        ],
    )
    phase2 = _csv_bytes(
        [
            "scenario",
            "criterion",
            "individuals",
            "society",
            "mitigation_effort",
            "duration",
            "control_effectiveness",
            "classification",
            "significant",
            "override",
        ],
        [
            [
                r.scenario_id,
                r.criterion_id,
                r.dimensions["individuals"],
                r.dimensions["society"],
                r.dimensions["mitigation_effort"],
                r.dimensions["duration"],
                r.control_effectiveness,
                r.classification,
                "yes" if r.significant else "no",
                "yes" if r.override else "no",
            ]
            for r in report.phase2_table
        ],
    )
    scenario_criteria = {r.scenario_id: r.criterion_id for r in report.phase2_table}
    actions = _csv_bytes(
        [
            "action_id",
            "scenario_id",
            "criterion",
            "action_type",
            "description",
            "owner",
            "status",
            "due",
        ],
        [
            [
                a["id"],
                a["scenario_id"],
                scenario_criteria.get(a["scenario_id"], ""),
                a["action_type"],
                a["description"],
                _owner_label(a["owner"]),
                a["status"],
                a["due"] or "",
            ]
            for a in report.remediation_section["actions"]
        ],
    )
    exclusions = _csv_bytes(
        ["item", "kind", "stage", "reason"],
        [[r.item, r.kind, r.stage, r.reason] for r in report.exclusions],
    )
    return {
        "phase1.csv": phase1,
        "phase2.csv": phase2,
        "remediation.csv": actions,
        "exclusions.csv": exclusions,
    }


def _fixed_width(header: list[str], rows: list[list[str]]) -> str:
    table = [header] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(header))))
    return "\n".join(lines)


def text_summary(report: AssessmentReport) -> str:
    sections = []
    meta = report.metadata
    sections.append(
        "\n".join(
            [
                f"Assessment: {meta['assessment_id']} ({meta['system_name']})",
                f"Status: {report.status}",
                f"Issued: {meta['issued_at']}",
            ]
        )
    )
    sections.append(
        "PHASE 1: CRITERION RELEVANCE\n"
        + _fixed_width(
            ["criterion", "domain", "score", "band", "advancing"],
            [
                [r.criterion_id, r.domain_name, str(r.score), r.band, "yes" if r.advancing else "no"]
                for r in report.phase1_table
            ],
        )
    )
    sections.append(
        "PHASE 2: SCENARIO EVALUATIONS\n"
        + _fixed_width(
            ["scenario", "criterion", "ind", "soc", "mit", "dur", "control", "classification", "significant"],
            [
                [
                    r.scenario_id,
                    r.criterion_id,
                    str(r.dimensions["individuals"]),
                    str(r.dimensions["society"]),
                    str(r.dimensions["mitigation_effort"]),
                    str(r.dimensions["duration"]),
                    r.control_effectiveness,
                    r.classification,
                    "yes" if r.significant else "no",
                ]
                for r in report.phase2_table
            ],
        )
    )
    sections.append(
        "REMEDIATION ACTIONS\n"
        + _fixed_width(
            ["action", "scenario", "type", "owner", "status", "description"],
            [
                [
                    a["id"],
                    a["scenario_id"],
                    a["action_type"],
                    _owner_label(a["owner"]),
                    a["status"],
                    a["description"],
                ]
                for a in report.remediation_section["actions"]
            ],
        )
    )
    sections.append(
        "EXCLUSIONS\n"
        + _fixed_width(
            ["item", "kind", "stage", "reason"],
            [[r.item, r.kind, r.stage, r.reason] for r in report.exclusions],
        )
    )
    return "\n\n".join(sections) + "\n"
