/**
 * Typed client for the engine's HTTP API. The UI talks only to these
 * endpoints; it never reaches a model backend directly.
 */

import type {
  AnimationUnit,
  ApiErrorBody,
  FrameRecord,
  InterpretationResult,
  SnapshotMeta,
  Timeline,
  WorkspaceManifest,
} from "./types";

export class ApiRequestError extends Error {
  readonly code: string;
  readonly status: number;
  readonly details?: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = status;
    this.details = body.details;
  }
}

export interface SseEvent {
  event: string;
  data: unknown;
}

/** Parse a server-sent-event stream chunk by chunk. */
export async function* sseEvents(body: ReadableStream<Uint8Array>): AsyncGenerator<SseEvent> {
  const decoder = new TextDecoder();
  const reader = body.getReader();
  let buffer = "";
  while (true) {
    const { done, value } = await reader.read();
    if (done) break;
    buffer += decoder.decode(value, { stream: true });
    let sep: number;
    while ((sep = buffer.indexOf("\n\n")) !== -1) {
      const chunk = buffer.slice(0, sep);
      buffer = buffer.slice(sep + 2);
      const event = parseSseChunk(chunk);
      if (event) yield event;
    }
  }
  const tail = parseSseChunk(buffer);
  if (tail) yield tail;
}

function parseSseChunk(chunk: string): SseEvent | null {
  let event = "message";
  const dataLines: string[] = [];
  for (const line of chunk.split("\n")) {
    if (line.startsWith("event: ")) event = line.slice("event: ".length);
    else if (line.startsWith("data: ")) dataLines.push(line.slice("data: ".length));
  }
  if (!dataLines.length) return null;
  return { event, data: JSON.parse(dataLines.join("\n")) };
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(method: string, path: string, init: RequestInit = {}): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { method, ...init });
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "unknown", message: `HTTP ${response.status}` };
      }
      throw new ApiRequestError(response.status, body);
    }
    return response;
  }

  private async json<T>(method: string, path: string, payload?: unknown): Promise<T> {
    const init: RequestInit =
      payload === undefined
        ? {}
        : {
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
          };
    const response = await this.request(method, path, init);
    return (await response.json()) as T;
  }

  createWorkspace(width: number, height: number): Promise<{ id: string }> {
    return this.json("POST", "/workspaces", { width, height });
  }

  async createWorkspaceFromImage(png: Uint8Array): Promise<{ id: string }> {
    const response = await this.request("POST", "/workspaces", {
      headers: { "Content-Type": "image/png" },
      body: png as BodyInit,
    });
    return (await response.json()) as { id: string };
  }

  getWorkspace(id: string): Promise<WorkspaceManifest> {
    return this.json("GET", `/workspaces/${id}`);
  }

  async putLayer(id: string, layer: "drawing" | "notation", png: Uint8Array): Promise<void> {
    await this.request("PUT", `/workspaces/${id}/layers/${layer}`, {
      headers: { "Content-Type": "image/png" },
      body: png as BodyInit,
    });
  }

  infer(id: string): Promise<InterpretationResult> {
    return this.json("POST", `/workspaces/${id}/infer`);
  }

  editUnit(
    id: string,
    unitId: string,
    edits: Partial<Record<"source" | "path" | "target" | "summary", string | null>>,
  ): Promise<InterpretationResult> {
    return this.json("POST", `/workspaces/${id}/units/${unitId}/edits`, edits);
  }

  reinfer(id: string): Promise<InterpretationResult> {
    return this.json("POST", `/workspaces/${id}/reinfer`);
  }

  setSlider(id: string, unitId: string, sliderId: string, value: number): Promise<AnimationUnit> {
    return this.json("PATCH", `/workspaces/${id}/units/${unitId}/sliders/${sliderId}`, { value });
  }

  moveBlock(id: string, blockId: string, start: number): Promise<Timeline> {
    return this.json("POST", `/workspaces/${id}/timeline/blocks/${blockId}:move`, { start });
  }

  resizeBlock(id: string, blockId: string, duration: number): Promise<Timeline> {
    return this.json("POST", `/workspaces/${id}/timeline/blocks/${blockId}:resize`, { duration });
  }

  deleteBlock(id: string, blockId: string): Promise<Timeline> {
    return this.json("POST", `/workspaces/${id}/timeline/blocks/${blockId}:delete`);
  }

  addBlock(
    id: string,
    block: { track_id: string; label: string; start: number; duration: number; description?: string },
  ): Promise<Timeline> {
    return this.json("POST", `/workspaces/${id}/timeline/blocks`, block);
  }

  /**
   * Run generation, streaming per-frame status into `onFrame`.
   * Resolves with the final frame list once the stream finishes.
   */
  async generate(id: string, onFrame?: (frame: FrameRecord) => void): Promise<FrameRecord[]> {
    const response = await this.request("POST", `/workspaces/${id}/generate`);
    if (!response.body) throw new ApiRequestError(500, { code: "no_stream", message: "no body" });
    let frames: FrameRecord[] = [];
    for await (const { event, data } of sseEvents(response.body)) {
      if (event === "frame" && onFrame) onFrame(data as FrameRecord);
      if (event === "done") frames = (data as { frames: FrameRecord[] }).frames;
      if (event === "error") {
        const body = data as ApiErrorBody;
        throw new ApiRequestError(502, body);
      }
    }
    return frames;
  }

  regenerate(id: string, index: number): Promise<FrameRecord[]> {
    return this.json("POST", `/workspaces/${id}/frames/${index}/regenerate`);
  }

  frameUrl(id: string, index: number): string {
    return `${this.baseUrl}/workspaces/${id}/frames/${index}`;
  }

  onionUrl(id: string, indices: number[]): string {
    return `${this.baseUrl}/workspaces/${id}/onion?frames=${indices.join(",")}`;
  }

  save(id: string): Promise<SnapshotMeta> {
    return this.json("POST", `/workspaces/${id}/save`);
  }

  history(id: string): Promise<SnapshotMeta[]> {
    return this.json("GET", `/workspaces/${id}/history`);
  }

  health(): Promise<{ status: string; backends: Record<string, string> }> {
    return this.json("GET", "/health");
  }
}
