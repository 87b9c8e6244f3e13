"""Command-line front end: validate catalogs, run scripted sessions, export, serve.

A session script is a JSONL file: one record per line, each a profile delta,
an answer, a scenario evaluation, or a remediation action (plus an optional
leading session header naming the assessment and the acting stakeholder).
The runner drives the phase gates implicitly from the record order, which
makes the whole methodology replayable in CI.

Exit codes: 0 success, 1 domain error (gate violations, unknown ids),
2 input error (unparseable catalog or script).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import report as report_mod
from .catalog import Catalog, parse_catalog, validate_catalog
from .checklist import answer_from_json
from .clock import DEFAULT_CLOCK_START, LogicalClock, WallClock
from .errors import (
    CatalogSyntaxError,
    FriaError,
    SchemaError,
    UnsupportedVersion,
)
from .jsoncheck import get_required, require_object, require_string
from .profile import StakeholderRef, stakeholder_from_json
from .remediation import ActionStatus, action_from_json
from .scenarios import control_from_json, dimensions_from_json
from .service import Service, serve
from .store import AssessmentPhase, FileStore
from .workflow import AssessmentWorkflow

DEFAULT_ACTOR = StakeholderRef(name="session-runner", role="assessment_runner")
DEFAULT_ASSESSMENT_ID = "assessment"

RECORD_KINDS = {"session", "profile", "answer", "evaluation", "action", "action_status"}

PHASE_RANK = {
    AssessmentPhase.PHASE0: 0,
    AssessmentPhase.PHASE1: 1,
    AssessmentPhase.PHASE2: 2,
    AssessmentPhase.OUTPUT: 3,
}
# Minimum phase each record kind needs before it can apply.
RECORD_PHASE = {"profile": 0, "answer": 1, "evaluation": 2, "action": 2, "action_status": 2}


def load_catalog(path: str) -> Catalog:
    return parse_catalog(Path(path).read_bytes())


def parse_script(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"script:{lineno}", f"invalid JSON: {exc.msg}") from exc
            obj = require_object(raw, f"script:{lineno}")
            kind = require_string(get_required(obj, "record", f"script:{lineno}"), f"script:{lineno}.record")
            if kind not in RECORD_KINDS:
                raise SchemaError(f"script:{lineno}.record", f"unknown record kind {kind!r}")
            if kind == "session" and records:
                raise SchemaError(f"script:{lineno}", "session header must be the first record")
            records.append(obj)
    return records


class SessionRunner:
    """Replays a script through the workflow, advancing gates as needed."""

    def __init__(self, workflow: AssessmentWorkflow, assessment_id: str, actor: StakeholderRef):
        self.workflow = workflow
        self.assessment_id = assessment_id
        self.actor = actor
        self.revision = 0

    def _advance_to(self, rank: int) -> None:
        while True:
            record = self.workflow.load_record(self.assessment_id)
            current = PHASE_RANK[record.phase]
            if current >= rank:
                return
            if record.phase is AssessmentPhase.PHASE0:
                self.revision, _ = self.workflow.complete_phase0(
                    self.assessment_id, self.actor, self.revision
                )
            elif record.phase is AssessmentPhase.PHASE1:
                self.revision, _ = self.workflow.complete_phase1(
                    self.assessment_id, self.actor, self.revision
                )
            elif record.phase is AssessmentPhase.PHASE2:
                self.revision, _ = self.workflow.complete_phase2(
                    self.assessment_id, self.actor, self.revision
                )

    def _record_actor(self, obj: dict, path: str) -> StakeholderRef:
        if "actor" in obj:
            return stakeholder_from_json(obj["actor"], f"{path}.actor")
        return self.actor

    def run(self, records: list[dict]) -> None:
        self.revision = self.workflow.create(self.assessment_id, self.actor)
        for index, obj in enumerate(records):
            path = f"script[{index}]"
            kind = obj["record"]
            if kind == "session":
                continue
            self._advance_to(RECORD_PHASE[kind])
            if kind == "profile":
                delta = require_object(get_required(obj, "set", path), f"{path}.set")
                self.revision = self.workflow.update_profile(
                    self.assessment_id, delta, self._record_actor(obj, path), self.revision
                )
            elif kind == "answer":
                payload = {k: v for k, v in obj.items() if k != "record"}
                answer = answer_from_json(payload, path)
                self.revision = self.workflow.record_answer(
                    self.assessment_id, answer, self.revision
                )
            elif kind == "evaluation":
                dimensions = dimensions_from_json(
                    get_required(obj, "dimensions", path), f"{path}.dimensions"
                )
                control = control_from_json(get_required(obj, "control", path), f"{path}.control")
                self.revision, _ = self.workflow.evaluate_scenario(
                    self.assessment_id,
                    require_string(get_required(obj, "scenario_id", path), f"{path}.scenario_id"),
                    dimensions,
                    control,
                    require_string(obj.get("rationale", ""), f"{path}.rationale"),
                    self._record_actor(obj, path),
                    self.revision,
                )
            elif kind == "action":
                payload = {k: v for k, v in obj.items() if k not in ("record", "actor")}
                if "id" not in payload:
                    payload["id"] = self.workflow.next_action_id(self.assessment_id)
                action = action_from_json(payload, path)
                self.revision = self.workflow.add_action(
                    self.assessment_id, action, self._record_actor(obj, path), self.revision
                )
            elif kind == "action_status":
                raw_status = require_string(get_required(obj, "status", path), f"{path}.status")
                try:
                    status = ActionStatus(raw_status)
                except ValueError:
                    raise SchemaError(f"{path}.status", f"unknown status {raw_status!r}") from None
                self.revision = self.workflow.set_action_status(
                    self.assessment_id,
                    require_string(get_required(obj, "action_id", path), f"{path}.action_id"),
                    status,
                    self._record_actor(obj, path),
                    self.revision,
                )
        self._advance_to(PHASE_RANK[AssessmentPhase.OUTPUT])


def session_header(records: list[dict]) -> tuple[Optional[str], Optional[StakeholderRef]]:
    if records and records[0].get("record") == "session":
        head = records[0]
        assessment_id = head.get("assessment_id")
        actor = (
            stakeholder_from_json(head["actor"], "script[0].actor") if "actor" in head else None
        )
        return assessment_id, actor
    return None, None


def write_report_files(built: report_mod.AssessmentReport, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    canonical = out_dir / "report.json"
    canonical.write_bytes(report_mod.export(built, report_mod.FORMAT_CANONICAL))
    written.append(canonical)
    text = out_dir / "report.txt"
    text.write_bytes(report_mod.export(built, report_mod.FORMAT_TEXT))
    written.append(text)
    for name, data in report_mod.csv_bundle(built).items():
        target = out_dir / name
        target.write_bytes(data)
        written.append(target)
    return written


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        catalog = load_catalog(args.catalog)
    except (CatalogSyntaxError, SchemaError, UnsupportedVersion, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    result = validate_catalog(catalog)
    for finding in result.findings:
        print(f"{finding.path} [{finding.rule}] {finding.message}")
    return 0 if result.ok else 1


def cmd_run(args) -> int:
    try:
        catalog = load_catalog(args.catalog)
        records = parse_script(args.script)
    except (CatalogSyntaxError, SchemaError, UnsupportedVersion, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    store_root = Path(args.store_root) if args.store_root else out_dir / "store"
    header_id, header_actor = session_header(records)
    assessment_id = args.assessment_id or header_id or DEFAULT_ASSESSMENT_ID
    actor = header_actor or DEFAULT_ACTOR

    clock = LogicalClock(start=args.clock_start, step_seconds=args.clock_step)
    try:
        workflow = AssessmentWorkflow(catalog, FileStore(store_root), clock)
        runner = SessionRunner(workflow, assessment_id, actor)
        runner.run(records)
        record = workflow.load_record(assessment_id)
        built = report_mod.build_report(record, catalog, issued_at=clock.now())
        written = write_report_files(built, out_dir)
    except FriaError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def cmd_report(args) -> int:
    try:
        catalog = load_catalog(args.catalog)
    except (CatalogSyntaxError, SchemaError, UnsupportedVersion, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    clock = LogicalClock(start=args.clock_start, step_seconds=1)
    out_dir = Path(args.out)
    try:
        workflow = AssessmentWorkflow(catalog, FileStore(args.store_root), clock)
        record = workflow.load_record(args.assessment_id)
        built = report_mod.build_report(record, catalog, issued_at=clock.now())
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.format == "canonical":
            target = out_dir / "report.json"
            target.write_bytes(report_mod.export(built, report_mod.FORMAT_CANONICAL))
            written = [target]
        elif args.format == "text":
            target = out_dir / "report.txt"
            target.write_bytes(report_mod.export(built, report_mod.FORMAT_TEXT))
            written = [target]
        else:
            written = []
            for name, data in report_mod.csv_bundle(built).items():
                target = out_dir / name
                target.write_bytes(data)
                written.append(target)
    except FriaError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def cmd_serve(args) -> int:
    try:
        catalog = load_catalog(args.catalog)
    except (CatalogSyntaxError, SchemaError, UnsupportedVersion, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    host, _, port = args.listen.rpartition(":")
    clock = (
        LogicalClock(start=args.clock_start, step_seconds=args.clock_step)
        if args.clock_start
        else WallClock()
    )
    workflow = AssessmentWorkflow(catalog, FileStore(args.store_root), clock)
    server = serve(Service(workflow), host or "127.0.0.1", int(port))
    bound_host, bound_port = server.server_address[:2]
    print(f"listening on {bound_host}:{bound_port}, store at {args.store_root}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fria", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a catalog file")
    p_validate.add_argument("catalog")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="run a session script end to end")
    p_run.add_argument("--catalog", required=True)
    p_run.add_argument("--script", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--store-root", default=None)
    p_run.add_argument("--assessment-id", default=None)
    p_run.add_argument("--clock-start", default=DEFAULT_CLOCK_START)
    p_run.add_argument("--clock-step", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("report", help="re-export a stored assessment")
    p_report.add_argument("assessment_id")
    p_report.add_argument("--catalog", required=True)
    p_report.add_argument("--store-root", required=True)
    p_report.add_argument("--out", required=True)
    p_report.add_argument("--format", choices=["canonical", "csv", "text"], default="canonical")
    p_report.add_argument("--clock-start", default=DEFAULT_CLOCK_START)
    p_report.set_defaults(func=cmd_report)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--listen", default="127.0.0.1:8000")
    p_serve.add_argument("--catalog", required=True)
    p_serve.add_argument("--store-root", required=True)
    p_serve.add_argument("--clock-start", default=None)
    p_serve.add_argument("--clock-step", type=int, default=1)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
