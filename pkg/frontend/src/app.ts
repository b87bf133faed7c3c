/** Page wiring: picker on top, results and workflow panes below. */

import { ApiClient, ApiError } from "./api.js";
import { renderPicker } from "./picker.js";
import { renderError, renderResults } from "./results.js";
import { pollWorkflow, renderWorkflowError } from "./workflow.js";

export interface AppElements {
  picker: HTMLElement;
  results: HTMLElement;
  workflow: HTMLElement;
  status: HTMLElement;
}

export async function startApp(
  client: ApiClient,
  elements: AppElements,
): Promise<void> {
  const healthy = await client.health().catch(() => false);
  if (!healthy) {
    elements.status.textContent = "service unreachable";
    return;
  }
  elements.status.textContent = "ready";

  const templates = await client.templates();
  renderPicker(elements.picker, templates, async ({ templateId, slotValues }) => {
    elements.status.textContent = "running…";
    try {
      const result = await client.submit(templateId, slotValues);
      renderResults(elements.results, result);
      elements.status.textContent = `query ${result.query_id}`;
      await pollWorkflow(elements.workflow, client, result.query_id);
    } catch (err) {
      if (err instanceof ApiError) {
        renderError(elements.results, err.stage, err.message);
        renderWorkflowError(elements.workflow, "no workflow for failed query");
        elements.status.textContent = "error";
      } else {
        throw err;
      }
    }
  });
}

export function mount(baseUrl: string): Promise<void> {
  const byId = (id: string): HTMLElement => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return startApp(new ApiClient(baseUrl), {
    picker: byId("picker"),
    results: byId("results"),
    workflow: byId("workflow"),
    status: byId("status"),
  });
}
