/** Workflow view: the execution log rendered as an ordered node chain. */

import type { ApiClient, WorkflowRecord } from "./api.js";
import { ApiError } from "./api.js";

export function renderWorkflow(
  container: HTMLElement,
  records: WorkflowRecord[],
): void {
  container.replaceChildren();
  const chain = document.createElement("ol");
  chain.className = "workflow";
  for (const record of records) {
    const item = document.createElement("li");
    item.className = `node status-${record.status}`;
    item.dataset.nodeId = record.node_id;
    item.dataset.status = record.status;
    const name = document.createElement("span");
    name.className = "node-id";
    name.textContent = record.node_id;
    const status = document.createElement("span");
    status.className = "node-status";
    status.textContent = record.status;
    item.append(name, " ", status);
    if (record.detail) {
      const detail = document.createElement("span");
      detail.className = "node-detail";
      detail.textContent = record.detail;
      item.append(" ", detail);
    }
    chain.appendChild(item);
  }
  container.appendChild(chain);
}

export function renderWorkflowError(
  container: HTMLElement,
  message: string,
): void {
  container.replaceChildren();
  const error = document.createElement("p");
  error.className = "error-state";
  error.textContent = message;
  container.appendChild(error);
}

const SETTLED = new Set(["done", "failed"]);

/**
 * Poll the workflow endpoint and re-render until every node settles.
 * Returns the final records (or null if the id is unknown).
 */
export async function pollWorkflow(
  container: HTMLElement,
  client: ApiClient,
  queryId: string,
  intervalMs = 250,
  maxPolls = 40,
): Promise<WorkflowRecord[] | null> {
  for (let i = 0; i < maxPolls; i++) {
    let records: WorkflowRecord[];
    try {
      records = (await client.workflow(queryId)).records;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        renderWorkflowError(container, `unknown query ${queryId}`);
        return null;
      }
      throw err;
    }
    renderWorkflow(container, records);
    if (records.every((r) => SETTLED.has(r.status) || r.status === "pending")
        && records.some((r) => SETTLED.has(r.status))) {
      const running = records.some((r) => r.status === "running");
      if (!running) return records;
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
  return (await client.workflow(queryId)).records;
}
