/**
 * Results dashboard: chart data, phase tables, remediation board.
 *
 * Everything displayed is read straight off the report; the console never
 * recomputes a score or classification. Draft reports get an explicit
 * coverage-gap callout instead of pretending to be final.
 */

import type { Report } from "./types.js";

const PAGE_SIZE = 10;

export function renderDashboard(root: HTMLElement, report: Report, pageSize = PAGE_SIZE): void {
  root.innerHTML = "";
  const container = el("div", "dashboard");

  const header = el("header", "dashboard-header");
  const title = el("h2");
  title.textContent = `${report.metadata.system_name} (${report.metadata.assessment_id})`;
  header.appendChild(title);
  const status = el("span", `report-status status-${report.status.toLowerCase()}`);
  status.textContent = report.status;
  header.appendChild(status);
  const issued = el("span", "issued-at");
  issued.textContent = `issued ${report.metadata.issued_at}`;
  header.appendChild(issued);
  container.appendChild(header);

  if (report.status === "Draft") {
    const callout = el("div", "coverage-gap-callout");
    callout.setAttribute("role", "alert");
    const uncovered = report.remediation_section.uncovered_required;
    callout.textContent = `Draft: required scenarios still uncovered: ${uncovered.join(", ")}`;
    container.appendChild(callout);
  }

  container.appendChild(renderChart(report));
  container.appendChild(
    renderTable(
      "phase1-table",
      "Phase 1: criterion relevance",
      ["Criterion", "Domain", "Score", "Band", "Advancing"],
      report.phase1_table.map((row) => [
        row.criterion_name,
        row.domain_name,
        String(row.score),
        row.band,
        row.advancing ? "yes" : "no",
      ]),
      pageSize,
    ),
  );
  container.appendChild(
    renderTable(
      "phase2-table",
      "Phase 2: scenario evaluations",
      ["Scenario", "Criterion", "Control", "Classification", "Significant"],
      report.phase2_table.map((row) => [
        row.scenario_id,
        row.criterion_id,
        row.control_effectiveness,
        row.classification,
        row.significant ? "yes" : "no",
      ]),
      pageSize,
    ),
  );
  container.appendChild(renderBoard(report));
  container.appendChild(
    renderTable(
      "exclusions-table",
      "Exclusions",
      ["Item", "Kind", "Stage", "Reason"],
      report.exclusions.map((row) => [row.item, row.kind, row.stage, row.reason]),
      pageSize,
    ),
  );
  root.appendChild(container);
}

function renderChart(report: Report): HTMLElement {
  const section = el("section", "chart");
  const heading = el("h3");
  heading.textContent = "Scenario classifications by domain";
  section.appendChild(heading);
  const domains = report.chart_data.scenario_classifications_by_domain;
  for (const domain of Object.keys(domains).sort()) {
    const group = el("div", "chart-domain");
    group.dataset.domain = domain;
    const label = el("h4");
    label.textContent = domain;
    group.appendChild(label);
    const counts = domains[domain];
    for (const classification of Object.keys(counts).sort()) {
      const count = counts[classification];
      const bar = el("div", "chart-bar");
      bar.dataset.domain = domain;
      bar.dataset.classification = classification;
      bar.dataset.count = String(count);
      bar.style.width = `${count * 48}px`;
      bar.textContent = `${classification}: ${count}`;
      group.appendChild(bar);
    }
    section.appendChild(group);
  }
  const bands = el("div", "band-counts");
  for (const [band, count] of Object.entries(report.chart_data.criterion_band_counts)) {
    const chip = el("span", "band-chip");
    chip.dataset.band = band;
    chip.dataset.count = String(count);
    chip.textContent = `${band}: ${count}`;
    bands.appendChild(chip);
  }
  section.appendChild(bands);
  return section;
}

function renderTable(
  className: string,
  caption: string,
  headers: string[],
  rows: string[][],
  pageSize: number,
): HTMLElement {
  const section = el("section", `table-section ${className}-section`);
  const heading = el("h3");
  heading.textContent = caption;
  section.appendChild(heading);

  const table = el("table", className) as HTMLTableElement;
  const thead = el("thead");
  const headRow = el("tr");
  for (const name of headers) {
    const th = el("th");
    th.textContent = name;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  table.appendChild(thead);
  const tbody = el("tbody");
  table.appendChild(tbody);
  section.appendChild(table);

  const pager = el("div", "pager");
  const prev = el("button", "pager-prev") as HTMLButtonElement;
  prev.textContent = "Prev";
  const indicator = el("span", "pager-indicator");
  const next = el("button", "pager-next") as HTMLButtonElement;
  next.textContent = "Next";
  pager.appendChild(prev);
  pager.appendChild(indicator);
  pager.appendChild(next);
  section.appendChild(pager);

  let page = 0;
  const pages = Math.max(1, Math.ceil(rows.length / pageSize));

  function paint(): void {
    tbody.innerHTML = "";
    for (const row of rows.slice(page * pageSize, (page + 1) * pageSize)) {
      const tr = el("tr");
      for (const cell of row) {
        const td = el("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      tbody.appendChild(tr);
    }
    indicator.textContent = `${page + 1} / ${pages}`;
    prev.disabled = page === 0;
    next.disabled = page >= pages - 1;
  }

  prev.addEventListener("click", () => {
    if (page > 0) {
      page -= 1;
      paint();
    }
  });
  next.addEventListener("click", () => {
    if (page < pages - 1) {
      page += 1;
      paint();
    }
  });
  paint();
  return section;
}

function renderBoard(report: Report): HTMLElement {
  const section = el("section", "remediation-board");
  const heading = el("h3");
  heading.textContent = "Remediation actions";
  section.appendChild(heading);

  const byOwner = new Map<string, typeof report.remediation_section.actions>();
  for (const action of report.remediation_section.actions) {
    const owner = action.owner.name || action.owner.role;
    const bucket = byOwner.get(owner) ?? [];
    bucket.push(action);
    byOwner.set(owner, bucket);
  }
  for (const owner of [...byOwner.keys()].sort()) {
    const group = el("div", "owner-group");
    group.dataset.owner = owner;
    const label = el("h4");
    label.textContent = owner;
    group.appendChild(label);
    for (const status of ["Proposed", "InProgress", "Done"]) {
      const column = el("div", "status-column");
      column.dataset.status = status;
      const columnLabel = el("h5");
      columnLabel.textContent = status;
      column.appendChild(columnLabel);
      for (const action of byOwner.get(owner) ?? []) {
        if (action.status !== status) continue;
        const card = el("div", "action-card");
        card.dataset.actionId = action.id;
        card.textContent = `${action.action_type}: ${action.description}`;
        column.appendChild(card);
      }
      group.appendChild(column);
    }
    section.appendChild(group);
  }
  return section;
}

function el(tag: string, className?: string): HTMLElement {
  const element = document.createElement(tag);
  if (className) element.className = className;
  return element;
}
