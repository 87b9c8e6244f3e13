/** The triage case-study session, read from the shared JSONL fixture. */

import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type { ActionInput, AnswerInput, ControlInput, DimensionScores, Stakeholder } from "../src/types.js";

const SCRIPT = resolve(__dirname, "..", "..", "tests", "fixtures", "triage_session.jsonl");

export interface FixtureSession {
  assessmentId: string;
  actor: Stakeholder;
  profileSet: Record<string, unknown>;
  answers: Array<{ questionId: string; answer: AnswerInput }>;
  evaluations: Array<{
    scenarioId: string;
    dimensions: DimensionScores;
    control: ControlInput;
    rationale: string;
  }>;
  actions: ActionInput[];
}

export function loadFixtureSession(): FixtureSession {
  const records = readFileSync(SCRIPT, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as Record<string, any>);

  const header = records.find((r) => r.record === "session")!;
  const profile = records.find((r) => r.record === "profile")!;
  return {
    assessmentId: header.assessment_id,
    actor: header.actor,
    profileSet: profile.set,
    answers: records
      .filter((r) => r.record === "answer")
      .map((r) => ({
        questionId: r.question_id,
        answer: {
          value: r.value,
          note: r.note ?? "",
          respondent: r.respondent,
          evidence_refs: r.evidence_refs ?? [],
        },
      })),
    evaluations: records
      .filter((r) => r.record === "evaluation")
      .map((r) => ({
        scenarioId: r.scenario_id,
        dimensions: r.dimensions,
        control: r.control,
        rationale: r.rationale,
      })),
    actions: records
      .filter((r) => r.record === "action")
      .map((r) => ({
        scenario_id: r.scenario_id,
        action_type: r.action_type,
        description: r.description,
        owner: r.owner,
        status: r.status,
        due: r.due,
      })),
  };
}

/** Questions the triage drivers filter out; they must never reach the DOM. */
export const FILTERED_QUESTION_IDS = [
  "dg_q_copyright",
  "dg_q_genai_provenance",
  "ho_q_use_monitoring",
];
