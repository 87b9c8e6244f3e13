"""Shared drivers for workflow-level tests."""

from __future__ import annotations

from pathlib import Path

from fria.catalog import Catalog
from fria.cli import SessionRunner, parse_script, session_header
from fria.clock import LogicalClock
from fria.store import MemoryStore
from fria.workflow import AssessmentWorkflow

FIXTURES = Path(__file__).parent / "fixtures"


def memory_workflow(catalog: Catalog) -> AssessmentWorkflow:
    return AssessmentWorkflow(catalog, MemoryStore(), LogicalClock())


def run_fixture_session(catalog: Catalog, script_path: Path | None = None) -> tuple[AssessmentWorkflow, str]:
    """Replay the triage session script in memory; returns (workflow, assessment id)."""
    workflow = memory_workflow(catalog)
    records = parse_script(str(script_path or FIXTURES / "triage_session.jsonl"))
    assessment_id, actor = session_header(records)
    runner = SessionRunner(workflow, assessment_id, actor)
    runner.run(records)
    return workflow, assessment_id
