"""Phase 0: the AI system overview.

Captures what the system is, who is accountable for keeping the overview
current, and the three driver facts (lifecycle stage, domain flags, system
types) that parameterize every downstream gate. Profiles are immutable
values; the workflow layer turns deltas into new revisions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import IncompleteProfile, SchemaError
from .jsoncheck import (
    get_required,
    reject_unknown_keys,
    require_int,
    require_nonempty_string,
    require_object,
    require_string,
    require_string_array,
)


class LifecycleStage(str, Enum):
    DESIGN = "Design"
    IMPLEMENTATION = "Implementation"
    DEPLOYMENT = "Deployment"
    POST_DEPLOYMENT = "PostDeployment"


@dataclass(frozen=True)
class StakeholderRef:
    """Opaque reference to a person or team; no identity management here."""

    name: str
    role: str
    contact: str = ""


@dataclass(frozen=True)
class Stewardship:
    """Accountability for keeping the overview current."""

    owner: StakeholderRef
    review_interval_days: int
    last_reviewed: str


@dataclass(frozen=True)
class SystemProfile:
    system_name: str = ""
    purpose: str = ""
    operational_context: str = ""
    stakeholders: tuple[StakeholderRef, ...] = ()
    lifecycle_stage: Optional[LifecycleStage] = None
    domain_flags: frozenset[str] = frozenset()
    system_types: frozenset[str] = frozenset()
    stewardship: Optional[Stewardship] = None


@dataclass(frozen=True)
class DriverSet:
    """Pure projection of the profile facts that drive filtering."""

    lifecycle_stage: LifecycleStage
    domain_flags: frozenset[str]
    system_types: frozenset[str]


# Fields that must be set before Phase 0 can complete, in declaration order.
MANDATORY_FIELDS = ("system_name", "purpose", "lifecycle_stage", "stewardship")

# Fields whose change invalidates downstream phase results.
DRIVER_FIELDS = ("lifecycle_stage", "domain_flags", "system_types")


def missing_fields(profile: SystemProfile) -> list[str]:
    missing = []
    for field_name in MANDATORY_FIELDS:
        value = getattr(profile, field_name)
        if value is None or value == "":
            missing.append(field_name)
    return missing


def create_profile(initial: Mapping[str, Any]) -> SystemProfile:
    """Build a (possibly incomplete) profile from an initial field delta."""
    return apply_delta(SystemProfile(), initial)


def apply_delta(profile: SystemProfile, delta: Mapping[str, Any]) -> SystemProfile:
    """Apply a JSON field delta, validating each value. Unknown fields are rejected."""
    updates: dict[str, Any] = {}
    for key, value in delta.items():
        path = f"profile.{key}"
        if key in ("system_name", "purpose", "operational_context"):
            updates[key] = require_string(value, path)
        elif key == "lifecycle_stage":
            updates[key] = _parse_lifecycle(value, path)
        elif key in ("domain_flags", "system_types"):
            updates[key] = frozenset(require_string_array(value, path))
        elif key == "stakeholders":
            if not isinstance(value, list):
                raise SchemaError(path, "expected an array")
            updates[key] = tuple(
                stakeholder_from_json(item, f"{path}[{idx}]") for idx, item in enumerate(value)
            )
        elif key == "stewardship":
            updates[key] = None if value is None else stewardship_from_json(value, path)
        else:
            raise SchemaError(path, "unknown field")
    return replace(profile, **updates)


def drivers(profile: SystemProfile) -> DriverSet:
    if profile.lifecycle_stage is None:
        raise IncompleteProfile(["lifecycle_stage"])
    return DriverSet(
        lifecycle_stage=profile.lifecycle_stage,
        domain_flags=profile.domain_flags,
        system_types=profile.system_types,
    )


def complete_phase0(profile: SystemProfile) -> DriverSet:
    """Gate out of Phase 0: all mandatory fields present, stewardship set."""
    missing = missing_fields(profile)
    if missing:
        raise IncompleteProfile(missing)
    return drivers(profile)


def drivers_changed(before: SystemProfile, after: SystemProfile) -> bool:
    return any(getattr(before, f) != getattr(after, f) for f in DRIVER_FIELDS)


def review_overdue(stewardship: Stewardship, now_iso: str) -> bool:
    """Whether the overview review interval has elapsed. Surfaced, never enforced."""
    last = datetime.strptime(stewardship.last_reviewed, "%Y-%m-%dT%H:%M:%SZ")
    now = datetime.strptime(now_iso, "%Y-%m-%dT%H:%M:%SZ")
    return now > last + timedelta(days=stewardship.review_interval_days)


def _parse_lifecycle(value: Any, path: str) -> Optional[LifecycleStage]:
    if value is None:
        return None
    text = require_string(value, path)
    try:
        return LifecycleStage(text)
    except ValueError:
        raise SchemaError(path, f"unknown lifecycle stage {text!r}") from None


def stakeholder_from_json(value: Any, path: str) -> StakeholderRef:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"name", "role", "contact"}, path)
    return StakeholderRef(
        name=require_string(obj.get("name", ""), f"{path}.name"),
        role=require_nonempty_string(get_required(obj, "role", path), f"{path}.role"),
        contact=require_string(obj.get("contact", ""), f"{path}.contact"),
    )


def stakeholder_to_json(ref: StakeholderRef) -> dict:
    return {"name": ref.name, "role": ref.role, "contact": ref.contact}


def stewardship_from_json(value: Any, path: str) -> Stewardship:
    obj = require_object(value, path)
    reject_unknown_keys(obj, {"owner", "review_interval_days", "last_reviewed"}, path)
    interval = require_int(
        get_required(obj, "review_interval_days", path), f"{path}.review_interval_days"
    )
    if interval < 1:
        raise SchemaError(f"{path}.review_interval_days", "must be >= 1")
    return Stewardship(
        owner=stakeholder_from_json(get_required(obj, "owner", path), f"{path}.owner"),
        review_interval_days=interval,
        last_reviewed=require_string(
            get_required(obj, "last_reviewed", path), f"{path}.last_reviewed"
        ),
    )


def stewardship_to_json(st: Stewardship) -> dict:
    return {
        "owner": stakeholder_to_json(st.owner),
        "review_interval_days": st.review_interval_days,
        "last_reviewed": st.last_reviewed,
    }


def profile_to_json(profile: SystemProfile) -> dict:
    return {
        "system_name": profile.system_name,
        "purpose": profile.purpose,
        "operational_context": profile.operational_context,
        "stakeholders": [stakeholder_to_json(s) for s in profile.stakeholders],
        "lifecycle_stage": profile.lifecycle_stage.value if profile.lifecycle_stage else None,
        "domain_flags": sorted(profile.domain_flags),
        "system_types": sorted(profile.system_types),
        "stewardship": stewardship_to_json(profile.stewardship) if profile.stewardship else None,
    }


def profile_from_json(value: Any, path: str = "profile") -> SystemProfile:
    obj = require_object(value, path)
    reject_unknown_keys(
        obj,
        {
            "system_name",
            "purpose",
            "operational_context",
            "stakeholders",
            "lifecycle_stage",
            "domain_flags",
            "system_types",
            "stewardship",
        },
        path,
    )
    return apply_delta(SystemProfile(), obj)
