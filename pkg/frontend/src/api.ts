/** Typed client for the fedlog query service HTTP API. */

export interface TemplateSlot {
  name: string;
  kind: "enum" | "integer" | string;
  values: string[];
  min: number | null;
  max: number | null;
}

export interface Template {
  id: string;
  text: string;
  slots: TemplateSlot[];
}

export interface Column {
  name: string;
  kind: "scalar" | "link" | string;
}

export interface QueryResult {
  query_id: string;
  columns: Column[];
  rows: string[][];
  timings: Record<string, number>;
  cache_hit: boolean;
  warnings: string[];
}

export interface QueryError {
  stage: string;
  error: string;
}

export interface WorkflowRecord {
  node_id: string;
  status: "pending" | "running" | "done" | "failed" | string;
  detail?: string;
}

export interface WorkflowState {
  query_id: string;
  records: WorkflowRecord[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly stage: string,
    message: string,
  ) {
    super(message);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let stage = "http";
  let message = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    const detail = body?.detail ?? body;
    if (detail?.stage) stage = detail.stage;
    if (detail?.error) message = detail.error;
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, stage, message);
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async health(): Promise<boolean> {
    const response = await fetch(this.url("/health"));
    return response.ok;
  }

  async templates(): Promise<Template[]> {
    const response = await fetch(this.url("/templates"));
    if (!response.ok) await raiseFor(response);
    return response.json();
  }

  async submit(
    templateId: string,
    slotValues: Record<string, string>,
  ): Promise<QueryResult> {
    const response = await fetch(this.url("/query"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ template_id: templateId, slot_values: slotValues }),
    });
    if (!response.ok) await raiseFor(response);
    return response.json();
  }

  async workflow(queryId: string): Promise<WorkflowState> {
    const response = await fetch(
      this.url(`/query/${encodeURIComponent(queryId)}/workflow`),
    );
    if (!response.ok) await raiseFor(response);
    return response.json();
  }
}
