/**
 * Typed client for the assessment service.
 *
 * Every write carries the actor and the caller's revision token; the server
 * rejects stale tokens with 409, which the wizard turns into a refetch-and-
 * replay cycle. The client never computes scores or classifications; it only
 * moves the server's answers around.
 */

import type {
  ActionInput,
  AnswerInput,
  ControlInput,
  DimensionScores,
  ErrorPayload,
  Phase,
  ProfileEnvelope,
  QuestionItem,
  Report,
  ScenarioItem,
  Stakeholder,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly payload: ErrorPayload;

  constructor(status: number, payload: ErrorPayload) {
    super(`${payload.error}: ${payload.detail ?? ""}`);
    this.status = status;
    this.payload = payload;
  }

  get isRevisionConflict(): boolean {
    return this.status === 409 && this.payload.error === "RevisionConflict";
  }
}

export class ApiClient {
  constructor(private readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await response.text();
    if (!response.ok) {
      let payload: ErrorPayload;
      try {
        payload = JSON.parse(text) as ErrorPayload;
      } catch {
        payload = { error: "http-error", detail: text };
      }
      throw new ApiError(response.status, payload);
    }
    return (text ? JSON.parse(text) : {}) as T;
  }

  createAssessment(assessmentId: string, actor: Stakeholder) {
    return this.request<{ assessment_id: string; revision: number }>("POST", "/assessments", {
      assessment_id: assessmentId,
      actor,
    });
  }

  listAssessments() {
    return this.request<{
      assessments: Array<{
        assessment_id: string;
        revision: number;
        phase: Phase;
        system_name: string;
      }>;
    }>("GET", "/assessments");
  }

  getProfile(id: string) {
    return this.request<ProfileEnvelope>("GET", `/assessments/${id}/profile`);
  }

  patchProfile(id: string, set: Record<string, unknown>, actor: Stakeholder, revision: number) {
    return this.request<{ revision: number }>("PATCH", `/assessments/${id}/profile`, {
      set,
      actor,
      expected_revision: revision,
    });
  }

  completePhase0(id: string, actor: Stakeholder, revision: number) {
    return this.request<{ revision: number }>("POST", `/assessments/${id}/phase0/complete`, {
      actor,
      expected_revision: revision,
    });
  }

  getQuestions(id: string) {
    return this.request<{ revision: number; questions: QuestionItem[] }>(
      "GET",
      `/assessments/${id}/questions`,
    );
  }

  putAnswer(id: string, questionId: string, answer: AnswerInput, revision: number) {
    return this.request<{ revision: number }>("PUT", `/assessments/${id}/answers/${questionId}`, {
      ...answer,
      expected_revision: revision,
    });
  }

  completePhase1(id: string, actor: Stakeholder, revision: number) {
    return this.request<{
      revision: number;
      gate: { advancing: string[]; excluded: Record<string, string> };
    }>("POST", `/assessments/${id}/phase1/complete`, { actor, expected_revision: revision });
  }

  getScenarios(id: string) {
    return this.request<{ revision: number; scenarios: ScenarioItem[] }>(
      "GET",
      `/assessments/${id}/scenarios`,
    );
  }

  putEvaluation(
    id: string,
    scenarioId: string,
    input: {
      dimensions: DimensionScores;
      control: ControlInput;
      rationale: string;
      actor: Stakeholder;
    },
    revision: number,
  ) {
    return this.request<{ revision: number; classification: string; significant: boolean }>(
      "PUT",
      `/assessments/${id}/evaluations/${scenarioId}`,
      { ...input, expected_revision: revision },
    );
  }

  postAction(id: string, action: ActionInput, actor: Stakeholder, revision: number) {
    return this.request<{ revision: number; action_id: string }>(
      "POST",
      `/assessments/${id}/actions`,
      { ...action, actor, expected_revision: revision },
    );
  }

  completePhase2(id: string, actor: Stakeholder, revision: number) {
    return this.request<{ revision: number; finalizations: Record<string, string> }>(
      "POST",
      `/assessments/${id}/phase2/complete`,
      { actor, expected_revision: revision },
    );
  }

  getReport(id: string) {
    return this.request<Report>(
      "GET",
      `/assessments/${id}/report?format=canonical-structured`,
    );
  }
}
