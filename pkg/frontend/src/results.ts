/** Results view: tabular answers with hyperlink cells and run metadata. */

import type { QueryResult } from "./api.js";

function looksLikeUrl(value: string): boolean {
  return /^https?:\/\//.test(value);
}

function cell(value: string, kind: string): HTMLTableCellElement {
  const td = document.createElement("td");
  if (kind === "link" && looksLikeUrl(value)) {
    const anchor = document.createElement("a");
    anchor.href = value;
    anchor.textContent = value;
    anchor.target = "_blank";
    anchor.rel = "noopener";
    td.appendChild(anchor);
  } else {
    td.textContent = value;
  }
  return td;
}

export function renderResults(
  container: HTMLElement,
  result: QueryResult,
): void {
  container.replaceChildren();

  const meta = document.createElement("p");
  meta.className = "result-meta";
  const count = document.createElement("span");
  count.className = "row-count";
  count.textContent = `${result.rows.length} row${result.rows.length === 1 ? "" : "s"}`;
  const elapsed = document.createElement("span");
  elapsed.className = "elapsed";
  const total = result.timings["total"] ?? 0;
  elapsed.textContent = `${(total * 1000).toFixed(1)} ms`;
  meta.append(count, " · ", elapsed);
  if (result.cache_hit) {
    const badge = document.createElement("span");
    badge.className = "cache-badge";
    badge.textContent = "cached";
    meta.append(" · ", badge);
  }
  container.appendChild(meta);

  for (const warning of result.warnings) {
    const note = document.createElement("p");
    note.className = "warning";
    note.textContent = warning;
    container.appendChild(note);
  }

  const table = document.createElement("table");
  table.className = "results";
  const head = table.createTHead().insertRow();
  for (const column of result.columns) {
    const th = document.createElement("th");
    th.textContent = column.name;
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of result.rows) {
    const tr = body.insertRow();
    result.columns.forEach((column, i) => {
      tr.appendChild(cell(row[i] ?? "", column.kind));
    });
  }
  container.appendChild(table);

  if (result.rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No rows matched this query.";
    container.appendChild(empty);
  }
}

export function renderError(
  container: HTMLElement,
  stage: string,
  message: string,
): void {
  container.replaceChildren();
  const error = document.createElement("p");
  error.className = "error-state";
  error.textContent = `[${stage}] ${message}`;
  container.appendChild(error);
}
