/**
 * SessionView: the console's picture of one assessment, rebuilt from the API.
 *
 * Pending items mirror the server's gate errors: unanswered applicable
 * questions block Phase 1, unevaluated scenarios block Phase 2, uncovered
 * required scenarios keep the report in Draft. The revision token is carried
 * on every write, so the server decides whether this view is current.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Phase, QuestionItem, Report, ScenarioItem } from "./types.js";

export interface SessionView {
  assessmentId: string;
  phase: Phase;
  revision: number;
  missingProfileFields: string[];
  pendingQuestions: QuestionItem[];
  allQuestions: QuestionItem[];
  pendingScenarios: ScenarioItem[];
  allScenarios: ScenarioItem[];
  uncoveredRequired: string[];
  report: Report | null;
  stale: boolean;
}

export const PHASE_ORDER: Phase[] = ["Phase0", "Phase1", "Phase2", "Output"];

export function phaseIndex(phase: Phase): number {
  return PHASE_ORDER.indexOf(phase);
}

export async function loadSession(api: ApiClient, assessmentId: string): Promise<SessionView> {
  const profile = await api.getProfile(assessmentId);
  const view: SessionView = {
    assessmentId,
    phase: profile.phase,
    revision: profile.revision,
    missingProfileFields: profile.missing_fields,
    pendingQuestions: [],
    allQuestions: [],
    pendingScenarios: [],
    allScenarios: [],
    uncoveredRequired: [],
    report: null,
    stale: profile.stale_phase1 || profile.stale_phase2,
  };
  if (phaseIndex(profile.phase) >= phaseIndex("Phase1")) {
    const { questions } = await api.getQuestions(assessmentId);
    view.allQuestions = questions;
    view.pendingQuestions = questions.filter((q) => !q.answered);
  }
  if (phaseIndex(profile.phase) >= phaseIndex("Phase2")) {
    const { scenarios } = await api.getScenarios(assessmentId);
    view.allScenarios = scenarios;
    view.pendingScenarios = scenarios.filter((s) => !s.evaluated);
  }
  if (profile.phase === "Output") {
    try {
      view.report = await api.getReport(assessmentId);
      view.uncoveredRequired = view.report.remediation_section.uncovered_required;
    } catch (error) {
      if (!(error instanceof ApiError)) throw error;
      view.report = null;
    }
  }
  return view;
}
