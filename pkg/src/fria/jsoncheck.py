"""Strict field extraction for untrusted JSON documents.

All helpers raise SchemaError with the path of the offending field. Parsers
built on these helpers reject unknown keys, which keeps the accepted input
language exactly the one the canonical serializer can reproduce.
"""

from __future__ import annotations

from typing import Any

from .errors import SchemaError


def require_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, "expected an object")
    return value


def require_array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array")
    return value


def require_string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, "expected a string")
    return value


def require_nonempty_string(value: Any, path: str) -> str:
    text = require_string(value, path)
    if not text:
        raise SchemaError(path, "must not be empty")
    return text


def require_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, "expected an integer")
    return value


def require_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(path, "expected a boolean")
    return value


def require_string_array(value: Any, path: str) -> list[str]:
    items = require_array(value, path)
    return [require_string(item, f"{path}[{idx}]") for idx, item in enumerate(items)]


def reject_unknown_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SchemaError(f"{path}.{unknown[0]}", "unknown field")


def get_required(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    return obj[key]
