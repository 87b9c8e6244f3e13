"""HTTP API over the workflow: thin, stateless routing onto module operations.

Plain WSGI, JSON bodies mirroring the canonical file formats. Writes carry
the actor and the expected revision; stale writes get 409, validation
failures 422 with rule ids, incomplete-phase gates 409 with the missing
items. The service holds no mutable state of its own, so concurrent
requests are only serialized where the store's revision check demands it.
"""

from __future__ import annotations

import json
import re
from typing import Any, Callable, Iterable
from urllib.parse import parse_qs

from . import report as report_mod
from .canonical import canonical_bytes
from .checklist import answer_from_json
from .errors import (
    EvidenceRequired,
    FriaError,
    IncompletePhase,
    IncompleteProfile,
    InvalidAction,
    MissingJustification,
    MissingRationale,
    NoScenarioApplicable,
    NotFound,
    PhaseIncomplete,
    QuestionNotApplicable,
    RevisionConflict,
    ScenarioNotEligible,
    SchemaError,
    StalePhase,
)
from .catalog import catalog_to_json
from .jsoncheck import get_required, require_int, require_object, require_string
from .profile import missing_fields, profile_to_json, review_overdue, stakeholder_from_json
from .remediation import action_from_json
from .scenarios import control_from_json, dimensions_from_json, instance_to_json
from .store import event_to_json, record_to_json
from .workflow import AssessmentWorkflow

STATUS_TEXT = {
    200: "200 OK",
    201: "201 Created",
    400: "400 Bad Request",
    404: "404 Not Found",
    405: "405 Method Not Allowed",
    409: "409 Conflict",
    422: "422 Unprocessable Entity",
    500: "500 Internal Server Error",
}

CONFLICT_ERRORS = (
    RevisionConflict,
    IncompleteProfile,
    IncompletePhase,
    PhaseIncomplete,
    NoScenarioApplicable,
    StalePhase,
)
VALIDATION_ERRORS = (
    SchemaError,
    QuestionNotApplicable,
    MissingJustification,
    EvidenceRequired,
    MissingRationale,
    ScenarioNotEligible,
    InvalidAction,
)


class Service:
    """WSGI application exposing one workflow (one catalog, one store)."""

    def __init__(self, workflow: AssessmentWorkflow):
        self.workflow = workflow
        self.routes: list[tuple[str, re.Pattern, Callable]] = [
            ("POST", re.compile(r"^/assessments$"), self.create_assessment),
            ("GET", re.compile(r"^/assessments$"), self.list_assessments),
            ("GET", re.compile(r"^/assessments/([^/]+)/profile$"), self.get_profile),
            ("PATCH", re.compile(r"^/assessments/([^/]+)/profile$"), self.patch_profile),
            ("POST", re.compile(r"^/assessments/([^/]+)/phase0/complete$"), self.phase0_complete),
            ("GET", re.compile(r"^/assessments/([^/]+)/questions$"), self.get_questions),
            ("PUT", re.compile(r"^/assessments/([^/]+)/answers/([^/]+)$"), self.put_answer),
            ("POST", re.compile(r"^/assessments/([^/]+)/phase1/complete$"), self.phase1_complete),
            ("GET", re.compile(r"^/assessments/([^/]+)/scenarios$"), self.get_scenarios),
            ("PUT", re.compile(r"^/assessments/([^/]+)/evaluations/([^/]+)$"), self.put_evaluation),
            ("POST", re.compile(r"^/assessments/([^/]+)/actions$"), self.post_action),
            ("POST", re.compile(r"^/assessments/([^/]+)/phase2/complete$"), self.phase2_complete),
            ("GET", re.compile(r"^/assessments/([^/]+)/report$"), self.get_report),
            ("GET", re.compile(r"^/assessments/([^/]+)/audit$"), self.get_audit),
            ("GET", re.compile(r"^/assessments/([^/]+)$"), self.get_assessment),
            ("GET", re.compile(r"^/catalog$"), self.get_catalog),
        ]

    # -- WSGI entry ----------------------------------------------------------

    def __call__(self, environ: dict, start_response: Callable) -> Iterable[bytes]:
        method = environ.get("REQUEST_METHOD", "GET")
        path = environ.get("PATH_INFO", "/")
        query = parse_qs(environ.get("QUERY_STRING", ""))
        try:
            body = self._read_body(environ)
        except ValueError:
            return self._respond(start_response, 400, {"error": "bad-request", "detail": "invalid JSON body"})

        matched_path = False
        for route_method, pattern, handler in self.routes:
            match = pattern.match(path)
            if not match:
                continue
            matched_path = True
            if route_method != method:
                continue
            try:
                status, payload, content_type = self._run(handler, match.groups(), body, query)
            except CONFLICT_ERRORS as exc:
                return self._respond(start_response, 409, exc.payload())
            except NotFound as exc:
                return self._respond(start_response, 404, exc.payload())
            except VALIDATION_ERRORS as exc:
                return self._respond(start_response, 422, exc.payload())
            except FriaError as exc:
                return self._respond(start_response, 422, exc.payload())
            return self._respond(start_response, status, payload, content_type)

        if matched_path:
            return self._respond(
                start_response, 405, {"error": "method-not-allowed", "detail": method}
            )
        return self._respond(start_response, 404, {"error": "NotFound", "detail": path})

    def _run(self, handler, groups, body, query):
        result = handler(*groups, body=body, query=query)
        if len(result) == 2:
            status, payload = result
            return status, payload, "application/json"
        return result

    @staticmethod
    def _read_body(environ: dict) -> Any:
        try:
            length = int(environ.get("CONTENT_LENGTH") or 0)
        except ValueError:
            length = 0
        if length == 0:
            return None
        raw = environ["wsgi.input"].read(length)
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError("invalid JSON") from exc

    @staticmethod
    def _respond(start_response, status: int, payload, content_type: str = "application/json"):
        if isinstance(payload, (bytes, bytearray)):
            body = bytes(payload)
        else:
            body = canonical_bytes(payload)
        headers = [
            ("Content-Type", f"{content_type}; charset=utf-8"),
            ("Content-Length", str(len(body))),
        ]
        start_response(STATUS_TEXT[status], headers)
        return [body]

    # -- request field helpers ------------------------------------------------

    @staticmethod
    def _body_object(body: Any) -> dict:
        return require_object(body if body is not None else {}, "body")

    @staticmethod
    def _actor(obj: dict):
        return stakeholder_from_json(get_required(obj, "actor", "body"), "body.actor")

    @staticmethod
    def _expected_revision(obj: dict) -> int:
        return require_int(get_required(obj, "expected_revision", "body"), "body.expected_revision")

    # -- handlers -------------------------------------------------------------

    def create_assessment(self, body=None, query=None):
        obj = self._body_object(body)
        assessment_id = require_string(
            get_required(obj, "assessment_id", "body"), "body.assessment_id"
        )
        actor = self._actor(obj)
        revision = self.workflow.create(assessment_id, actor)
        return 201, {"assessment_id": assessment_id, "revision": revision}

    def list_assessments(self, body=None, query=None):
        summaries = self.workflow.store.list_assessments()
        return 200, {
            "assessments": [
                {
                    "assessment_id": s.id,
                    "revision": s.revision,
                    "phase": s.phase.value,
                    "system_name": s.system_name,
                }
                for s in summaries
            ]
        }

    def get_assessment(self, assessment_id, body=None, query=None):
        record = self.workflow.load_record(assessment_id)
        return 200, record_to_json(record)

    def get_catalog(self, body=None, query=None):
        return 200, catalog_to_json(self.workflow.catalog)

    def get_profile(self, assessment_id, body=None, query=None):
        record = self.workflow.load_record(assessment_id)
        overdue = (
            review_overdue(record.profile.stewardship, self.workflow.clock.now())
            if record.profile.stewardship
            else False
        )
        return 200, {
            "profile": profile_to_json(record.profile),
            "revision": record.revision,
            "phase": record.phase.value,
            "missing_fields": missing_fields(record.profile),
            "review_overdue": overdue,
            "stale_phase1": record.stale_phase1,
            "stale_phase2": record.stale_phase2,
        }

    def patch_profile(self, assessment_id, body=None, query=None):
        obj = self._body_object(body)
        delta = require_object(get_required(obj, "set", "body"), "body.set")
        revision = self.workflow.update_profile(
            assessment_id, delta, self._actor(obj), self._expected_revision(obj)
        )
        return 200, {"revision": revision}

    def phase0_complete(self, assessment_id, body=None, query=None):
        obj = self._body_object(body)
        revision, driver_set = self.workflow.complete_phase0(
            assessment_id, self._actor(obj), self._expected_revision(obj)
        )
        return 200, {
            "revision": revision,
            "drivers": {
                "lifecycle_stage": driver_set.lifecycle_stage.value,
                "domain_flags": sorted(driver_set.domain_flags),
                "system_types": sorted(driver_set.system_types),
            },
        }

    def get_questions(self, assessment_id, body=None, query=None):
        record = self.workflow.load_record(assessment_id)
        questions = self.workflow.applicable_questions(assessment_id)
        return 200, {
            "revision": record.revision,
            "questions": [
                {
                    "id": q.id,
                    "criterion_id": q.criterion_id,
                    "text": q.text,
                    "stakeholder_role": q.stakeholder_role,
                    "answered": q.id in record.answers,
                }
                for q in questions
            ],
        }

    def put_answer(self, assessment_id, question_id, body=None, query=None):
        obj = self._body_object(body)
        expected = self._expected_revision(obj)
        payload = {key: value for key, value in obj.items() if key != "expected_revision"}
        payload["question_id"] = question_id
        answer = answer_from_json(payload, "body")
        revision = self.workflow.record_answer(assessment_id, answer, expected)
        return 200, {"revision": revision}

    def phase1_complete(self, assessment_id, body=None, query=None):
        obj = self._body_object(body)
        revision, decision = self.workflow.complete_phase1(
            assessment_id, self._actor(obj), self._expected_revision(obj)
        )
        return 200, {"revision": revision, "gate": decision.to_json()}

    def get_scenarios(self, assessment_id, body=None, query=None):
        record = self.workflow.load_record(assessment_id)
        return 200, {
            "revision": record.revision,
            "scenarios": [
                dict(instance_to_json(s), evaluated=s.id in record.evaluations)
                for s in record.scenarios
            ],
        }

    def put_evaluation(self, assessment_id, scenario_id, body=None, query=None):
        obj = self._body_object(body)
        dimensions = dimensions_from_json(get_required(obj, "dimensions", "body"), "body.dimensions")
        control = control_from_json(get_required(obj, "control", "body"), "body.control")
        rationale = require_string(obj.get("rationale", ""), "body.rationale")
        revision, evaluation = self.workflow.evaluate_scenario(
            assessment_id,
            scenario_id,
            dimensions,
            control,
            rationale,
            self._actor(obj),
            self._expected_revision(obj),
        )
        return 200, {
            "revision": revision,
            "classification": evaluation.classification.value,
            "significant": evaluation.significant,
        }

    def post_action(self, assessment_id, body=None, query=None):
        obj = self._body_object(body)
        actor = self._actor(obj)
        expected = self._expected_revision(obj)
        payload = {
            key: value
            for key, value in obj.items()
            if key not in ("expected_revision", "actor")
        }
        if "id" not in payload:
            payload["id"] = self.workflow.next_action_id(assessment_id)
        action = action_from_json(payload, "body")
        revision = self.workflow.add_action(assessment_id, action, actor, expected)
        return 200, {"revision": revision, "action_id": action.id}

    def phase2_complete(self, assessment_id, body=None, query=None):
        obj = self._body_object(body)
        revision, finalizations = self.workflow.complete_phase2(
            assessment_id, self._actor(obj), self._expected_revision(obj)
        )
        return 200, {
            "revision": revision,
            "finalizations": {
                cid: f.classification.value for cid, f in sorted(finalizations.items())
            },
        }

    def get_report(self, assessment_id, body=None, query=None):
        record = self.workflow.load_record(assessment_id)
        built = report_mod.build_report(
            record, self.workflow.catalog, issued_at=self.workflow.clock.now()
        )
        format_name = (query or {}).get("format", [report_mod.FORMAT_CANONICAL])[0]
        if format_name == report_mod.FORMAT_CANONICAL:
            return 200, report_mod.export(built, format_name), "application/json"
        if format_name == report_mod.FORMAT_TEXT:
            return 200, report_mod.export(built, format_name), "text/plain"
        if format_name == report_mod.FORMAT_CSV:
            table = (query or {}).get("table", [None])[0]
            bundle = report_mod.csv_bundle(built)
            name = f"{table}.csv" if table else None
            if name not in bundle:
                raise SchemaError(
                    "query.table", f"csv export needs table= one of {', '.join(report_mod.CSV_TABLES)}"
                )
            return 200, bundle[name], "text/csv"
        raise SchemaError("query.format", f"unknown format {format_name!r}")

    def get_audit(self, assessment_id, body=None, query=None):
        events = self.workflow.audit_trail(assessment_id)
        if not events and not self.workflow.store.exists(assessment_id):
            raise NotFound(f"assessment {assessment_id}")
        return 200, {"events": [event_to_json(e) for e in events]}


def serve(service: Service, host: str, port: int, quiet: bool = False):
    """Blocking HTTP server; returns the server object when used programmatically."""
    from socketserver import ThreadingMixIn
    from wsgiref.simple_server import WSGIRequestHandler, WSGIServer, make_server

    class ThreadingWSGIServer(ThreadingMixIn, WSGIServer):
        daemon_threads = True

    handler = WSGIRequestHandler
    if quiet:

        class QuietHandler(WSGIRequestHandler):
            def log_message(self, format, *args):
                pass

        handler = QuietHandler

    server = make_server(
        host, port, service, server_class=ThreadingWSGIServer, handler_class=handler
    )
    return server
