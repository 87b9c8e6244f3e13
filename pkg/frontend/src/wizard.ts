/**
 * Phase wizard: intake, checklist, scenario evaluation, remediation entry.
 *
 * The wizard renders whichever step the server's phase allows and never
 * unlocks a later step on its own; every transition is a server gate. Writes
 * carry the session's revision token. A stale token gets a conflict notice
 * and a refetched view with the operator's entries preserved for replay; a
 * validation failure surfaces as an inline message on the offending field.
 */

import { ApiClient, ApiError } from "./api.js";
import { loadSession, SessionView } from "./session.js";
import { renderDashboard } from "./dashboard.js";
import type {
  ActionInput,
  AnswerInput,
  ControlInput,
  DimensionScores,
  ErrorPayload,
  Stakeholder,
} from "./types.js";

export const STEP_TITLES = [
  "System intake",
  "Rights checklist",
  "Impact scenarios",
  "Remediation",
  "Dashboard",
];

const ANSWER_VALUES = ["Adequate", "Partial", "Inadequate", "NotApplicable"] as const;
const EFFECTIVENESS = ["Absent", "Ineffective", "PartiallyEffective", "Effective"] as const;
const ACTION_TYPES = [
  "PolicyRevision",
  "ControlImplementation",
  "Training",
  "Documentation",
  "Monitoring",
  "DesignChange",
] as const;
const LIFECYCLE_STAGES = ["Design", "Implementation", "Deployment", "PostDeployment"] as const;

type Draft = Record<string, Record<string, string>>;

export class Wizard {
  view: SessionView | null = null;
  conflict: ErrorPayload | null = null;
  fieldErrors: Record<string, string> = {};
  /** Form entries preserved across conflict replays, keyed per pending item. */
  draft: Draft = {};

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    readonly assessmentId: string,
    private readonly actor: Stakeholder,
  ) {}

  async start(): Promise<void> {
    await this.refresh();
  }

  async refresh(): Promise<void> {
    this.view = await loadSession(this.api, this.assessmentId);
    this.render();
  }

  /** Shared write path: submit, then refetch; conflicts keep the draft. */
  private async write(submit: (revision: number) => Promise<unknown>): Promise<boolean> {
    if (!this.view) throw new Error("wizard not started");
    try {
      await submit(this.view.revision);
    } catch (error) {
      if (error instanceof ApiError && error.isRevisionConflict) {
        this.conflict = error.payload;
        this.view = await loadSession(this.api, this.assessmentId);
        this.render();
        return false;
      }
      if (error instanceof ApiError) {
        this.fieldErrors = fieldErrorsFrom(error.payload);
        this.render();
        return false;
      }
      throw error;
    }
    this.conflict = null;
    this.fieldErrors = {};
    await this.refresh();
    return true;
  }

  async saveProfile(set: Record<string, unknown>): Promise<boolean> {
    this.draft["profile"] = { json: JSON.stringify(set) };
    const ok = await this.write((rev) =>
      this.api.patchProfile(this.assessmentId, set, this.actor, rev),
    );
    if (ok) delete this.draft["profile"];
    return ok;
  }

  async completeIntake(): Promise<boolean> {
    return this.write((rev) => this.api.completePhase0(this.assessmentId, this.actor, rev));
  }

  async submitAnswer(questionId: string, answer: AnswerInput): Promise<boolean> {
    this.draft[`answer:${questionId}`] = { value: answer.value, note: answer.note };
    const ok = await this.write((rev) =>
      this.api.putAnswer(this.assessmentId, questionId, answer, rev),
    );
    if (ok) delete this.draft[`answer:${questionId}`];
    return ok;
  }

  async completeChecklist(): Promise<boolean> {
    return this.write((rev) => this.api.completePhase1(this.assessmentId, this.actor, rev));
  }

  async submitEvaluation(
    scenarioId: string,
    input: {
      dimensions: DimensionScores;
      control: ControlInput;
      rationale: string;
    },
  ): Promise<boolean> {
    this.draft[`evaluation:${scenarioId}`] = {
      rationale: input.rationale,
      effectiveness: input.control.effectiveness,
    };
    const ok = await this.write((rev) =>
      this.api.putEvaluation(
        this.assessmentId,
        scenarioId,
        { ...input, actor: this.actor },
        rev,
      ),
    );
    if (ok) delete this.draft[`evaluation:${scenarioId}`];
    return ok;
  }

  async completeEvaluation(): Promise<boolean> {
    return this.write((rev) => this.api.completePhase2(this.assessmentId, this.actor, rev));
  }

  async submitAction(action: ActionInput): Promise<boolean> {
    this.draft["action"] = { description: action.description, scenario: action.scenario_id };
    const ok = await this.write((rev) =>
      this.api.postAction(this.assessmentId, action, this.actor, rev),
    );
    if (ok) delete this.draft["action"];
    return ok;
  }

  currentStep(): number {
    if (!this.view) return 0;
    const byPhase: Record<string, number> = { Phase0: 0, Phase1: 1, Phase2: 2 };
    if (this.view.phase !== "Output") return byPhase[this.view.phase];
    return this.view.uncoveredRequired.length > 0 ? 3 : 4;
  }

  // -- rendering ------------------------------------------------------------

  render(): void {
    if (!this.view) return;
    const step = this.currentStep();
    this.root.innerHTML = "";
    const container = el("div", "wizard");
    container.appendChild(this.renderNav(step));
    if (this.conflict) {
      const banner = el("div", "conflict-banner");
      banner.setAttribute("role", "alert");
      banner.textContent =
        "Another stakeholder updated this assessment. Your entries are preserved; review and resubmit.";
      container.appendChild(banner);
    }
    if (this.view.stale) {
      const stale = el("div", "stale-banner");
      stale.textContent =
        "Drivers changed after intake; earlier phase results are stale until re-run.";
      container.appendChild(stale);
    }
    if (this.fieldErrors["_step"]) {
      const msg = el("div", "step-error");
      msg.textContent = this.fieldErrors["_step"];
      container.appendChild(msg);
    }
    const content = el("section", "wizard-content");
    switch (step) {
      case 0:
        this.renderIntake(content);
        break;
      case 1:
        this.renderChecklist(content);
        break;
      case 2:
        this.renderScenarios(content);
        break;
      case 3:
        this.renderRemediation(content);
        break;
      case 4:
        if (this.view.report) renderDashboard(content, this.view.report);
        break;
    }
    container.appendChild(content);
    this.root.appendChild(container);
  }

  private renderNav(current: number): HTMLElement {
    const nav = el("nav", "wizard-nav");
    STEP_TITLES.forEach((title, index) => {
      const button = el("button", "nav-step") as HTMLButtonElement;
      button.textContent = `${index + 1}. ${title}`;
      button.dataset.step = String(index);
      // later phases stay locked until the server grants the gate
      button.disabled = index > current;
      if (index === current) button.classList.add("active");
      nav.appendChild(button);
    });
    return nav;
  }

  private inlineError(parent: HTMLElement, key: string): void {
    if (this.fieldErrors[key]) {
      const message = el("span", "field-error");
      message.dataset.field = key;
      message.textContent = this.fieldErrors[key];
      parent.appendChild(message);
    }
  }

  private renderIntake(content: HTMLElement): void {
    if (!this.view) return;
    const heading = el("h2");
    heading.textContent = STEP_TITLES[0];
    content.appendChild(heading);

    const missing = el("p", "missing-fields");
    missing.textContent = this.view.missingProfileFields.length
      ? `Missing: ${this.view.missingProfileFields.join(", ")}`
      : "Profile complete.";
    content.appendChild(missing);

    const form = el("form", "intake-form") as HTMLFormElement;
    const draft = this.draft["profile"];
    const saved = draft ? (JSON.parse(draft.json) as Record<string, unknown>) : {};
    form.appendChild(labeledInput("system_name", "System name", String(saved.system_name ?? "")));
    form.appendChild(labeledInput("purpose", "Purpose", String(saved.purpose ?? "")));
    form.appendChild(
      labeledInput(
        "operational_context",
        "Operational context",
        String(saved.operational_context ?? ""),
      ),
    );
    form.appendChild(
      labeledSelect("lifecycle_stage", "Lifecycle stage", [...LIFECYCLE_STAGES], ""),
    );
    form.appendChild(labeledInput("domain_flags", "Domain flags (comma separated)", ""));
    form.appendChild(labeledInput("system_types", "System types (comma separated)", ""));
    this.inlineError(form, "profile");

    const save = el("button", "save-profile") as HTMLButtonElement;
    save.type = "submit";
    save.textContent = "Save profile";
    form.appendChild(save);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const set: Record<string, unknown> = {
        system_name: data.get("system_name") || "",
        purpose: data.get("purpose") || "",
        operational_context: data.get("operational_context") || "",
        domain_flags: splitList(data.get("domain_flags")),
        system_types: splitList(data.get("system_types")),
      };
      const stage = data.get("lifecycle_stage");
      if (stage) set.lifecycle_stage = stage;
      void this.saveProfile(set);
    });
    content.appendChild(form);

    const advance = el("button", "complete-intake") as HTMLButtonElement;
    advance.textContent = "Start checklist";
    advance.disabled = this.view.missingProfileFields.length > 0;
    advance.addEventListener("click", () => void this.completeIntake());
    content.appendChild(advance);
  }

  private renderChecklist(content: HTMLElement): void {
    if (!this.view) return;
    const heading = el("h2");
    heading.textContent = STEP_TITLES[1];
    content.appendChild(heading);

    const list = el("ul", "checklist");
    for (const question of this.view.allQuestions) {
      const item = el("li", "question-item");
      item.dataset.questionId = question.id;
      if (question.answered) item.classList.add("answered");

      const text = el("p", "question-text");
      text.textContent = `${question.text} (${question.stakeholder_role})`;
      item.appendChild(text);

      if (question.answered) {
        const badge = el("span", "answered-badge");
        badge.textContent = "answered";
        item.appendChild(badge);
      } else {
        const draft = this.draft[`answer:${question.id}`] ?? {};
        const select = el("select", "answer-value") as HTMLSelectElement;
        for (const value of ANSWER_VALUES) {
          const option = document.createElement("option");
          option.value = value;
          option.textContent = value;
          select.appendChild(option);
        }
        if (draft.value) select.value = draft.value;
        item.appendChild(select);

        const note = el("input", "answer-note") as HTMLInputElement;
        note.placeholder = "Note / justification";
        note.value = draft.note ?? "";
        item.appendChild(note);
        this.inlineError(item, "note");

        const submit = el("button", "submit-answer") as HTMLButtonElement;
        submit.textContent = "Record answer";
        submit.addEventListener("click", () =>
          void this.submitAnswer(question.id, {
            value: select.value as AnswerInput["value"],
            note: note.value,
            respondent: this.actor,
          }),
        );
        item.appendChild(submit);
      }
      list.appendChild(item);
    }
    content.appendChild(list);

    const advance = el("button", "complete-checklist") as HTMLButtonElement;
    advance.textContent = "Close checklist";
    advance.disabled = this.view.pendingQuestions.length > 0;
    advance.addEventListener("click", () => void this.completeChecklist());
    content.appendChild(advance);
  }

  private renderScenarios(content: HTMLElement): void {
    if (!this.view) return;
    const heading = el("h2");
    heading.textContent = STEP_TITLES[2];
    content.appendChild(heading);

    const list = el("ul", "scenario-list");
    for (const scenario of this.view.allScenarios) {
      const item = el("li", "scenario-item");
      item.dataset.scenarioId = scenario.id;
      if (scenario.evaluated) item.classList.add("evaluated");

      const narrative = el("p", "scenario-narrative");
      narrative.textContent = scenario.narrative;
      item.appendChild(narrative);

      const draft = this.draft[`evaluation:${scenario.id}`] ?? {};
      const dims: Record<string, HTMLSelectElement> = {};
      for (const name of ["individuals", "society", "mitigation_effort", "duration"]) {
        const select = el("select", `dim-${name}`) as HTMLSelectElement;
        for (const score of [0, 1, 2, 3]) {
          const option = document.createElement("option");
          option.value = String(score);
          option.textContent = String(score);
          select.appendChild(option);
        }
        dims[name] = select;
        item.appendChild(select);
      }
      const control = el("select", "control-effectiveness") as HTMLSelectElement;
      for (const value of EFFECTIVENESS) {
        const option = document.createElement("option");
        option.value = value;
        option.textContent = value;
        control.appendChild(option);
      }
      if (draft.effectiveness) control.value = draft.effectiveness;
      item.appendChild(control);

      const evidence = el("input", "evidence-refs") as HTMLInputElement;
      evidence.placeholder = "Evidence refs (comma separated)";
      item.appendChild(evidence);
      this.inlineError(item, "evidence_refs");

      const rationale = el("input", "evaluation-rationale") as HTMLInputElement;
      rationale.placeholder = "Rationale";
      rationale.value = draft.rationale ?? "";
      item.appendChild(rationale);
      this.inlineError(item, "rationale");

      const submit = el("button", "submit-evaluation") as HTMLButtonElement;
      submit.textContent = scenario.evaluated ? "Re-evaluate" : "Evaluate";
      submit.addEventListener("click", () =>
        void this.submitEvaluation(scenario.id, {
          dimensions: {
            individuals: Number(dims.individuals.value),
            society: Number(dims.society.value),
            mitigation_effort: Number(dims.mitigation_effort.value),
            duration: Number(dims.duration.value),
          },
          control: {
            effectiveness: control.value as ControlInput["effectiveness"],
            evidence_refs: splitList(evidence.value),
            control_owner: this.actor,
          },
          rationale: rationale.value,
        }),
      );
      item.appendChild(submit);
      list.appendChild(item);
    }
    content.appendChild(list);

    const advance = el("button", "complete-evaluation") as HTMLButtonElement;
    advance.textContent = "Close impact assessment";
    advance.disabled = this.view.pendingScenarios.length > 0;
    advance.addEventListener("click", () => void this.completeEvaluation());
    content.appendChild(advance);
  }

  private renderRemediation(content: HTMLElement): void {
    if (!this.view) return;
    const heading = el("h2");
    heading.textContent = STEP_TITLES[3];
    content.appendChild(heading);

    const gap = el("div", "coverage-gap");
    gap.textContent = this.view.uncoveredRequired.length
      ? `Required scenarios without an action: ${this.view.uncoveredRequired.join(", ")}`
      : "All required scenarios covered.";
    content.appendChild(gap);

    const report = this.view.report;
    const eligible = report
      ? [
          ...report.remediation_section.required_scenarios,
          ...report.remediation_section.recommended_scenarios,
        ]
      : [];
    const form = el("form", "action-form") as HTMLFormElement;
    const scenarioSelect = el("select", "action-scenario") as HTMLSelectElement;
    scenarioSelect.name = "scenario_id";
    for (const sid of eligible) {
      const option = document.createElement("option");
      option.value = sid;
      option.textContent = sid;
      scenarioSelect.appendChild(option);
    }
    form.appendChild(scenarioSelect);

    const typeSelect = el("select", "action-type") as HTMLSelectElement;
    typeSelect.name = "action_type";
    for (const value of ACTION_TYPES) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      typeSelect.appendChild(option);
    }
    form.appendChild(typeSelect);

    const description = el("input", "action-description") as HTMLInputElement;
    description.name = "description";
    description.placeholder = "Action description";
    description.value = this.draft["action"]?.description ?? "";
    form.appendChild(description);
    this.inlineError(form, "description");

    const ownerName = el("input", "action-owner-name") as HTMLInputElement;
    ownerName.placeholder = "Owner name";
    form.appendChild(ownerName);
    const ownerRole = el("input", "action-owner-role") as HTMLInputElement;
    ownerRole.placeholder = "Owner role";
    form.appendChild(ownerRole);

    const submit = el("button", "add-action") as HTMLButtonElement;
    submit.type = "submit";
    submit.textContent = "Add action";
    form.appendChild(submit);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitAction({
        scenario_id: scenarioSelect.value,
        action_type: typeSelect.value as ActionInput["action_type"],
        description: description.value,
        owner: {
          name: ownerName.value || this.actor.name,
          role: ownerRole.value || this.actor.role,
        },
      });
    });
    content.appendChild(form);

    if (report) {
      const existing = el("ul", "existing-actions");
      for (const action of report.remediation_section.actions) {
        const item = el("li", "existing-action");
        item.dataset.actionId = action.id;
        item.textContent = `${action.id}: ${action.description} (${action.scenario_id})`;
        existing.appendChild(item);
      }
      content.appendChild(existing);
    }
  }
}

function fieldErrorsFrom(payload: ErrorPayload): Record<string, string> {
  switch (payload.error) {
    case "MissingJustification":
      return { note: "NotApplicable answers require a justification note." };
    case "EvidenceRequired":
      return { evidence_refs: "Claimed control effectiveness requires evidence references." };
    case "MissingRationale":
      return { rationale: "A rationale is required." };
    case "InvalidAction":
      return { description: payload.detail ?? "Invalid action." };
    case "QuestionNotApplicable":
      return { _step: `Question ${payload.question_id ?? ""} is not applicable.` };
    case "ScenarioNotEligible":
      return { _step: `Scenario ${payload.scenario_id ?? ""} needs no action.` };
    case "schema-error":
      return { [payload.path ?? "_step"]: payload.detail ?? "Invalid value." };
    case "IncompleteProfile":
    case "IncompletePhase":
      return { _step: `Still pending: ${(payload.missing ?? []).join(", ")}` };
    default:
      return { _step: payload.detail ?? payload.error };
  }
}

function el(tag: string, className?: string): HTMLElement {
  const element = document.createElement(tag);
  if (className) element.className = className;
  return element;
}

function labeledInput(name: string, label: string, value: string): HTMLElement {
  const wrapper = el("label", `field field-${name}`);
  const caption = el("span");
  caption.textContent = label;
  wrapper.appendChild(caption);
  const input = document.createElement("input");
  input.name = name;
  input.value = value;
  wrapper.appendChild(input);
  return wrapper;
}

function labeledSelect(name: string, label: string, options: string[], value: string): HTMLElement {
  const wrapper = el("label", `field field-${name}`);
  const caption = el("span");
  caption.textContent = label;
  wrapper.appendChild(caption);
  const select = document.createElement("select");
  select.name = name;
  const empty = document.createElement("option");
  empty.value = "";
  empty.textContent = "(select)";
  select.appendChild(empty);
  for (const option of options) {
    const node = document.createElement("option");
    node.value = option;
    node.textContent = option;
    select.appendChild(node);
  }
  select.value = value;
  wrapper.appendChild(select);
  return wrapper;
}

function splitList(raw: FormDataEntryValue | string | null): string[] {
  if (!raw) return [];
  return String(raw)
    .split(",")
    .map((item) => item.trim())
    .filter((item) => item.length > 0);
}
