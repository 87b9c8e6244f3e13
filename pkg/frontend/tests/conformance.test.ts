/**
 * Console conformance: scripted sessions against the live service.
 *
 * Covers the end-to-end fixture run through the wizard, the driver-filtered
 * checklist view, dashboard chart totals vs the phase 2 table, Draft
 * coverage callouts, inline validation messages, and the stale-revision
 * conflict path (notice shown, no data loss).
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Wizard } from "../src/wizard.js";
import { renderDashboard } from "../src/dashboard.js";
import { loadSession } from "../src/session.js";
import { FILTERED_QUESTION_IDS, loadFixtureSession } from "./fixture.js";
import { startServer, LiveServer } from "./server.js";

let server: LiveServer;
let api: ApiClient;

beforeAll(async () => {
  server = await startServer();
  api = new ApiClient(server.base);
});

afterAll(async () => {
  await server.stop();
});

function mountRoot(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

async function driveToChecklist(wizard: Wizard, fixture = loadFixtureSession()) {
  await wizard.start();
  expect(await wizard.saveProfile(fixture.profileSet)).toBe(true);
  expect(await wizard.completeIntake()).toBe(true);
}

describe("wizard end-to-end", () => {
  it("completes the triage fixture through every gate", async () => {
    const fixture = loadFixtureSession();
    await api.createAssessment(fixture.assessmentId, fixture.actor);
    const root = mountRoot();
    const wizard = new Wizard(root, api, fixture.assessmentId, fixture.actor);
    await driveToChecklist(wizard, fixture);

    // checklist view: the driver-filtered questions never reach the DOM
    const items = root.querySelectorAll(".question-item");
    expect(items.length).toBe(5);
    for (const filtered of FILTERED_QUESTION_IDS) {
      expect(root.querySelector(`[data-question-id="${filtered}"]`)).toBeNull();
    }

    for (const { questionId, answer } of fixture.answers) {
      expect(await wizard.submitAnswer(questionId, answer)).toBe(true);
    }
    expect(root.querySelectorAll(".question-item.answered").length).toBe(5);
    expect(await wizard.completeChecklist()).toBe(true);

    // scenario step: one instance per advancing criterion's applicable template
    const scenarios = [...root.querySelectorAll(".scenario-item")].map(
      (node) => (node as HTMLElement).dataset.scenarioId,
    );
    expect(scenarios).toEqual(["fa_s_underrepresentation", "ho_s_automation_bias"]);

    for (const evaluation of fixture.evaluations) {
      expect(
        await wizard.submitEvaluation(evaluation.scenarioId, {
          dimensions: evaluation.dimensions,
          control: evaluation.control,
          rationale: evaluation.rationale,
        }),
      ).toBe(true);
    }
    expect(await wizard.completeEvaluation()).toBe(true);

    // remediation step: the uncovered required scenario is called out
    expect(root.querySelector(".coverage-gap")?.textContent).toContain(
      "fa_s_underrepresentation",
    );
    for (const action of fixture.actions) {
      expect(await wizard.submitAction(action)).toBe(true);
    }

    // coverage complete: the wizard lands on the dashboard, report is Final
    expect(wizard.currentStep()).toBe(4);
    expect(root.querySelector(".report-status")?.textContent).toBe("Final");
    const cards = root.querySelectorAll(".action-card");
    expect(cards.length).toBe(2);

    // dashboard chart totals equal the phase 2 row count
    const bars = [...root.querySelectorAll(".chart-bar")] as HTMLElement[];
    const total = bars.reduce((sum, bar) => sum + Number(bar.dataset.count), 0);
    const report = await api.getReport(fixture.assessmentId);
    expect(total).toBe(report.phase2_table.length);

    // every displayed classification is exactly the server's value
    const shown = [...root.querySelectorAll(".phase2-table tbody tr")].map(
      (row) => row.children[3].textContent,
    );
    expect(shown.sort()).toEqual(
      report.phase2_table.map((r) => r.classification).sort(),
    );
  });

  it("locks later wizard steps until the server grants the gate", async () => {
    const fixture = loadFixtureSession();
    const id = "nav-lock-demo";
    await api.createAssessment(id, fixture.actor);
    const root = mountRoot();
    const wizard = new Wizard(root, api, id, fixture.actor);
    await wizard.start();
    const buttons = [...root.querySelectorAll(".nav-step")] as HTMLButtonElement[];
    expect(buttons.map((b) => b.disabled)).toEqual([false, true, true, true, true]);
  });

  it("surfaces validation failures as inline field messages", async () => {
    const fixture = loadFixtureSession();
    const id = "inline-error-demo";
    await api.createAssessment(id, fixture.actor);
    const root = mountRoot();
    const wizard = new Wizard(root, api, id, fixture.actor);
    await driveToChecklist(wizard, fixture);
    const ok = await wizard.submitAnswer("dg_q_minimization", {
      value: "NotApplicable",
      note: "",
      respondent: fixture.actor,
    });
    expect(ok).toBe(false);
    const message = root.querySelector('.field-error[data-field="note"]');
    expect(message?.textContent).toContain("justification");
  });
});

describe("concurrent stakeholders", () => {
  it("stale write shows a conflict notice and loses no entered data", async () => {
    const fixture = loadFixtureSession();
    const id = "conflict-demo";
    await api.createAssessment(id, fixture.actor);
    const rootA = mountRoot();
    const wizardA = new Wizard(rootA, api, id, fixture.actor);
    await driveToChecklist(wizardA, fixture);

    // a second tab loads the same assessment at the same revision
    const rootB = mountRoot();
    const wizardB = new Wizard(rootB, api, id, {
      name: "Priya Natarajan",
      role: "compliance_officer",
    });
    await wizardB.start();

    // tab A wins the race
    const first = fixture.answers[0];
    expect(await wizardA.submitAnswer(first.questionId, first.answer)).toBe(true);

    // tab B submits with the stale token: conflict notice, entries preserved
    const ok = await wizardB.submitAnswer("fa_q_accessibility", {
      value: "Partial",
      note: "tab B entry",
      respondent: { name: "Priya Natarajan", role: "compliance_officer" },
    });
    expect(ok).toBe(false);
    const banner = rootB.querySelector(".conflict-banner");
    expect(banner).not.toBeNull();
    expect(banner?.getAttribute("role")).toBe("alert");

    const replayItem = rootB.querySelector(
      '[data-question-id="fa_q_accessibility"]',
    ) as HTMLElement;
    const note = replayItem.querySelector(".answer-note") as HTMLInputElement;
    const value = replayItem.querySelector(".answer-value") as HTMLSelectElement;
    expect(note.value).toBe("tab B entry");
    expect(value.value).toBe("Partial");
    // the refreshed view also reflects tab A's write: no data loss on either side
    expect(
      rootB.querySelector(`[data-question-id="${first.questionId}"].answered`),
    ).not.toBeNull();

    // replaying with the refreshed token succeeds and clears the banner
    expect(
      await wizardB.submitAnswer("fa_q_accessibility", {
        value: "Partial",
        note: "tab B entry",
        respondent: { name: "Priya Natarajan", role: "compliance_officer" },
      }),
    ).toBe(true);
    expect(rootB.querySelector(".conflict-banner")).toBeNull();
  });
});

describe("dashboard", () => {
  it("marks draft reports with a coverage-gap callout", async () => {
    const fixture = loadFixtureSession();
    const id = "draft-demo";
    await api.createAssessment(id, fixture.actor);
    const root = mountRoot();
    const wizard = new Wizard(root, api, id, fixture.actor);
    await driveToChecklist(wizard, fixture);
    for (const { questionId, answer } of fixture.answers) {
      await wizard.submitAnswer(questionId, answer);
    }
    await wizard.completeChecklist();
    for (const evaluation of fixture.evaluations) {
      await wizard.submitEvaluation(evaluation.scenarioId, {
        dimensions: evaluation.dimensions,
        control: evaluation.control,
        rationale: evaluation.rationale,
      });
    }
    await wizard.completeEvaluation();

    const report = await api.getReport(id);
    expect(report.status).toBe("Draft");
    const dashboardRoot = mountRoot();
    renderDashboard(dashboardRoot, report);
    const callout = dashboardRoot.querySelector(".coverage-gap-callout");
    expect(callout?.textContent).toContain("fa_s_underrepresentation");
    // the wizard itself stays on the remediation step
    expect(wizard.currentStep()).toBe(3);
  });

  it("paginates long tables", async () => {
    const report = await api.getReport(loadFixtureSession().assessmentId);
    const root = mountRoot();
    renderDashboard(root, report, 1);
    const firstRows = root.querySelectorAll(".phase2-table tbody tr");
    expect(firstRows.length).toBe(1);
    const section = root.querySelector(".phase2-table-section")!;
    const next = section.querySelector(".pager-next") as HTMLButtonElement;
    expect(next.disabled).toBe(false);
    next.click();
    expect(section.querySelector(".pager-indicator")?.textContent).toBe("2 / 2");
    expect(section.querySelectorAll("tbody tr").length).toBe(1);
  });

  it("session view mirrors the server's gate state", async () => {
    const fixture = loadFixtureSession();
    const view = await loadSession(api, fixture.assessmentId);
    expect(view.phase).toBe("Output");
    expect(view.pendingQuestions).toEqual([]);
    expect(view.pendingScenarios).toEqual([]);
    expect(view.uncoveredRequired).toEqual([]);
    expect(view.report?.status).toBe("Final");
  });
});
