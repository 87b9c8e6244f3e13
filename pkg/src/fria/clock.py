"""Clocks for timestamping audit events and reports.

Batch runs use a logical clock (fixed start, fixed step per mutation) so the
same catalog and session script always produce byte-identical outputs. Live
serving uses the wall clock unless a deterministic clock is configured.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

TIME_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

DEFAULT_CLOCK_START = "2025-01-01T00:00:00Z"


def parse_time(value: str) -> datetime:
    return datetime.strptime(value, TIME_FORMAT).replace(tzinfo=timezone.utc)


def format_time(value: datetime) -> str:
    return value.strftime(TIME_FORMAT)


class LogicalClock:
    """Deterministic clock: now() is stable, tick() advances by a fixed step."""

    def __init__(self, start: str = DEFAULT_CLOCK_START, step_seconds: int = 1):
        self._current = parse_time(start)
        self._step = timedelta(seconds=step_seconds)

    def now(self) -> str:
        return format_time(self._current)

    def tick(self) -> str:
        self._current += self._step
        return format_time(self._current)


class WallClock:
    def now(self) -> str:
        return format_time(datetime.now(timezone.utc))

    def tick(self) -> str:
        return self.now()
