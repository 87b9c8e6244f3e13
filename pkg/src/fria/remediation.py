"""Remediation: typed corrective actions with explicit ownership.

Actions attach to scenarios that require or recommend intervention. Every
scenario in the requires_action bucket must be covered before a report can
leave Draft status; recommended scenarios may be covered but never block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from .errors import InvalidAction, ScenarioNotEligible, SchemaError
from .filtering import OutputPartition
from .jsoncheck import (
    get_required,
    reject_unknown_keys,
    require_object,
    require_string,
)
from .profile import StakeholderRef, stakeholder_from_json, stakeholder_to_json


class ActionType(str, Enum):
    POLICY_REVISION = "PolicyRevision"
    CONTROL_IMPLEMENTATION = "ControlImplementation"
    TRAINING = "Training"
    DOCUMENTATION = "Documentation"
    MONITORING = "Monitoring"
    DESIGN_CHANGE = "DesignChange"


class ActionStatus(str, Enum):
    PROPOSED = "Proposed"
    IN_PROGRESS = "InProgress"
    DONE = "Done"


_DUE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class RemediationAction:
    id: str
    scenario_id: str
    action_type: ActionType
    description: str
    owner: StakeholderRef
    status: ActionStatus = ActionStatus.PROPOSED
    due: Optional[str] = None


@dataclass(frozen=True)
class RemediationLedger:
    actions: tuple[RemediationAction, ...] = ()

    def coverage(self) -> dict[str, tuple[str, ...]]:
        mapping: dict[str, list[str]] = {}
        for action in self.actions:
            mapping.setdefault(action.scenario_id, []).append(action.id)
        return {sid: tuple(ids) for sid, ids in sorted(mapping.items())}

    def actions_by_id(self) -> dict[str, RemediationAction]:
        return {a.id: a for a in self.actions}


@dataclass(frozen=True)
class RequiredRemediations:
    required: tuple[str, ...]
    recommended: tuple[str, ...]


@dataclass(frozen=True)
class CoverageReport:
    uncovered_required: tuple[str, ...]

    @property
    def complete(self) -> bool:
        return not self.uncovered_required


def required_remediations(partition: OutputPartition) -> RequiredRemediations:
    return RequiredRemediations(
        required=partition.requires_action, recommended=partition.recommended
    )


def add_action(
    ledger: RemediationLedger, action: RemediationAction, partition: OutputPartition
) -> RemediationLedger:
    """Append an action for an eligible scenario; orphan actions are rejected here."""
    eligible = set(partition.requires_action) | set(partition.recommended)
    if action.scenario_id not in eligible:
        raise ScenarioNotEligible(action.scenario_id)
    if not action.description.strip():
        raise InvalidAction("action description must not be empty")
    if action.id in {a.id for a in ledger.actions}:
        raise InvalidAction(f"action id {action.id!r} already exists")
    return RemediationLedger(actions=ledger.actions + (action,))


def coverage_check(ledger: RemediationLedger, partition: OutputPartition) -> CoverageReport:
    covered = {a.scenario_id for a in ledger.actions}
    uncovered = tuple(s for s in partition.requires_action if s not in covered)
    return CoverageReport(uncovered_required=uncovered)


def action_to_json(action: RemediationAction) -> dict:
    return {
        "id": action.id,
        "scenario_id": action.scenario_id,
        "action_type": action.action_type.value,
        "description": action.description,
        "owner": stakeholder_to_json(action.owner),
        "status": action.status.value,
        "due": action.due,
    }


def action_from_json(value: Any, path: str = "action") -> RemediationAction:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj, {"id", "scenario_id", "action_type", "description", "owner", "status", "due"}, path
    )
    raw_type = require_string(get_required(obj, "action_type", path), f"{path}.action_type")
    try:
        action_type = ActionType(raw_type)
    except ValueError:
        raise SchemaError(f"{path}.action_type", f"unknown action type {raw_type!r}") from None
    raw_status = obj.get("status", ActionStatus.PROPOSED.value)
    try:
        status = ActionStatus(require_string(raw_status, f"{path}.status"))
    except ValueError:
        raise SchemaError(f"{path}.status", f"unknown status {raw_status!r}") from None
    due = obj.get("due")
    if due is not None:
        due = require_string(due, f"{path}.due")
        if not _DUE_RE.match(due):
            raise SchemaError(f"{path}.due", "expected YYYY-MM-DD")
    return RemediationAction(
        id=require_string(get_required(obj, "id", path), f"{path}.id"),
        scenario_id=require_string(
            get_required(obj, "scenario_id", path), f"{path}.scenario_id"
        ),
        action_type=action_type,
        description=require_string(get_required(obj, "description", path), f"{path}.description"),
        owner=stakeholder_from_json(get_required(obj, "owner", path), f"{path}.owner"),
        status=status,
        due=due,
    )


def ledger_to_json(ledger: RemediationLedger) -> dict:
    return {
        "actions": [action_to_json(a) for a in ledger.actions],
        "coverage": {sid: list(ids) for sid, ids in ledger.coverage().items()},
    }


def ledger_from_json(value: Any, path: str = "ledger") -> RemediationLedger:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"actions", "coverage"}, path)
    actions = tuple(
        action_from_json(item, f"{path}.actions[{i}]")
        for i, item in enumerate(obj.get("actions", []))
    )
    return RemediationLedger(actions=actions)
