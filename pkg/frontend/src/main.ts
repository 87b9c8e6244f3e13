/** Console bootstrap: pick or create an assessment, then hand off to the wizard. */

import { ApiClient } from "./api.js";
import { resolveConfig } from "./config.js";
import { Wizard } from "./wizard.js";
import type { Stakeholder } from "./types.js";

export function mount(root: HTMLElement): void {
  const config = resolveConfig();
  const api = new ApiClient(config.apiBase);
  renderPicker(root, api);
}

function renderPicker(root: HTMLElement, api: ApiClient): void {
  root.innerHTML = "";
  const container = document.createElement("div");
  container.className = "picker";
  const heading = document.createElement("h1");
  heading.textContent = "Rights impact assessments";
  container.appendChild(heading);

  const list = document.createElement("ul");
  list.className = "assessment-list";
  container.appendChild(list);

  const form = document.createElement("form");
  form.className = "create-form";
  const idInput = document.createElement("input");
  idInput.placeholder = "new assessment id";
  const nameInput = document.createElement("input");
  nameInput.placeholder = "your name";
  const roleInput = document.createElement("input");
  roleInput.placeholder = "your role";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Create";
  form.append(idInput, nameInput, roleInput, submit);
  container.appendChild(form);
  root.appendChild(container);

  const open = (assessmentId: string, actor: Stakeholder) => {
    const wizard = new Wizard(root, api, assessmentId, actor);
    void wizard.start();
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const actor: Stakeholder = {
      name: nameInput.value || "console user",
      role: roleInput.value || "stakeholder",
    };
    void api
      .createAssessment(idInput.value, actor)
      .then(() => open(idInput.value, actor));
  });

  void api.listAssessments().then(({ assessments }) => {
    for (const summary of assessments) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = `${summary.assessment_id} (${summary.phase}, rev ${summary.revision})`;
      button.addEventListener("click", () =>
        open(summary.assessment_id, { name: "console user", role: "stakeholder" }),
      );
      item.appendChild(button);
      list.appendChild(item);
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app") as HTMLElement);
}
