"""Canonical JSON encoding shared by catalog files, assessment records and reports.

Canonical form: keys sorted lexicographically, arrays of id-carrying objects
sorted by id, 2-space indentation, LF line endings, UTF-8. Byte-identical
output for equal values is what makes golden tests and the audit trail
meaningful, so every on-disk artifact goes through this module.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def _normalize(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _normalize(value[key]) for key in sorted(value)}
    if isinstance(value, (list, tuple)):
        items = [_normalize(item) for item in value]
        if items and all(isinstance(i, dict) and isinstance(i.get("id"), str) for i in items):
            items.sort(key=lambda i: i["id"])
        return items
    if isinstance(value, (set, frozenset)):
        return sorted(_normalize(item) for item in value)
    return value


def canonical_bytes(value: Any) -> bytes:
    text = json.dumps(_normalize(value), indent=2, sort_keys=True, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def canonical_line(value: Any) -> str:
    """Single-line canonical form, used for audit log entries."""
    return json.dumps(
        _normalize(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )


def content_digest(value: Any) -> str:
    """sha256 of the canonical bytes; ``null`` digests mark absent subjects."""
    return hashlib.sha256(canonical_bytes(value)).hexdigest()
