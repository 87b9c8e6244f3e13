from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"

sys.path.insert(0, str(TESTS_DIR))

from fria.catalog import parse_catalog  # noqa: E402
from fria.profile import DriverSet, LifecycleStage, StakeholderRef  # noqa: E402


@pytest.fixture(scope="session")
def triage_catalog_bytes() -> bytes:
    return (FIXTURES / "triage_catalog.json").read_bytes()


@pytest.fixture(scope="session")
def triage_catalog(triage_catalog_bytes):
    return parse_catalog(triage_catalog_bytes)


@pytest.fixture(scope="session")
def triage_drivers() -> DriverSet:
    return DriverSet(
        lifecycle_stage=LifecycleStage.IMPLEMENTATION,
        domain_flags=frozenset({"health", "critical_decision"}),
        system_types=frozenset({"chatbot", "decision_support"}),
    )


@pytest.fixture()
def actor() -> StakeholderRef:
    return StakeholderRef(name="Alex Kim", role="governance_lead", contact="a.kim@clinic.example")


@pytest.fixture(scope="session")
def session_script_path() -> Path:
    return FIXTURES / "triage_session.jsonl"


@pytest.fixture(scope="session")
def golden_report_path() -> Path:
    return FIXTURES / "golden_report.json"
