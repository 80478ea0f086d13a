/** Typed client for the workbench HTTP facade (see docs/protocol.md). */

export interface Verdict {
  obligation: string;
  status: "pass" | "fail" | "undecided";
}

export interface Outcome {
  kind: string;
  message: string;
  detail: string;
  verdicts: Verdict[];
  /** back-translated surface text of any derived definitions */
  display: string[];
  /** canonical transfer-language text of the outcome */
  transfer: string;
}

export type CellStatus = "accepted" | "rejected" | "stale" | "unsubmitted";

export interface ServerCell {
  index: number;
  source: string;
  status: CellStatus;
  outcomes: Outcome[];
}

export interface SessionInfo {
  id: string;
  revision: number;
  cellCount: number;
}

export interface CellsPayload {
  revision: number;
  cells: ServerCell[];
}

export interface SubmitResult {
  revision: number;
  cell: ServerCell;
  outcome: Outcome;
}

export interface CascadeRecord {
  revision: number;
  cell: ServerCell;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function toError(resp: Response): Promise<ApiError> {
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    /* not json */
  }
  return new ApiError(message, resp.status);
}

/** Split a streamed body into JSON records, one per line. */
export async function* ndjson<T>(
  body: ReadableStream<Uint8Array> | null,
): AsyncGenerator<T> {
  if (!body) return;
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      const lines = buffer.split("\n");
      buffer = lines.pop() ?? "";
      for (const line of lines) {
        if (line.trim()) yield JSON.parse(line) as T;
      }
    }
    if (buffer.trim()) yield JSON.parse(buffer) as T;
  } finally {
    reader.releaseLock();
  }
}

export class NotebookApi {
  constructor(
    readonly base: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(this.base + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) throw await toError(resp);
    return (await resp.json()) as T;
  }

  session(): Promise<SessionInfo> {
    return this.json<SessionInfo>("GET", "/session");
  }

  cells(): Promise<CellsPayload> {
    return this.json<CellsPayload>("GET", "/cells");
  }

  /** Append a cell and run it (the server rejects while blocked: 409). */
  append(source: string): Promise<SubmitResult> {
    return this.json<SubmitResult>("POST", "/cells", { source });
  }

  /** Edit a cell; the server re-runs it and everything after it, streaming
   * one record per cell. */
  async *edit(index: number, source: string): AsyncGenerator<CascadeRecord> {
    const resp = await this.fetchFn(`${this.base}/cells/${index}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ source }),
    });
    if (!resp.ok) throw await toError(resp);
    yield* ndjson<CascadeRecord>(resp.body);
  }

  async *rerun(index: number): AsyncGenerator<CascadeRecord> {
    const resp = await this.fetchFn(`${this.base}/cells/${index}/run`, {
      method: "POST",
    });
    if (!resp.ok) throw await toError(resp);
    yield* ndjson<CascadeRecord>(resp.body);
  }
}
