/** Thin client for the /v1 HTTP API — the UI's only data source. */

import type { ApiError, ExpansionModeName, SessionDocument, SessionNode } from "./types.js";

export class ServiceError extends Error {
  readonly code: string;
  readonly retryable: boolean;

  constructor(error: ApiError) {
    super(error.message);
    this.code = error.code;
    this.retryable = error.retryable;
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const fallback: ApiError = {
      code: "provider",
      message: `HTTP ${response.status}`,
      retryable: false,
    };
    throw new ServiceError((body as ApiError) ?? fallback);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}/v1${path}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.url(path), {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return parseResponse<T>(response);
  }

  createSession(prompt: string): Promise<{ session_id: string; root: SessionNode }> {
    return this.request("POST", "/sessions", { prompt });
  }

  getSession(sessionId: string): Promise<SessionDocument> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  expand(
    sessionId: string,
    nodeId: number,
    span: { char_start: number; char_end: number },
    mode: ExpansionModeName,
    novelty: number,
  ): Promise<{ nodes: SessionNode[] }> {
    return this.request("POST", `/sessions/${sessionId}/nodes/${nodeId}/expand`, {
      ...span,
      mode,
      novelty,
    });
  }

  showImages(sessionId: string, nodeId: number): Promise<{ images: { uri: string }[] }> {
    return this.request("POST", `/sessions/${sessionId}/nodes/${nodeId}/images`);
  }

  newSuggestion(sessionId: string, nodeId: number): Promise<{ replacement: SessionNode }> {
    return this.request("DELETE", `/sessions/${sessionId}/nodes/${nodeId}`);
  }

  editPrompt(sessionId: string, nodeId: number): Promise<{ node: SessionNode }> {
    return this.request("POST", `/sessions/${sessionId}/nodes/${nodeId}/branch`);
  }

  metrics(sessionId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/sessions/${sessionId}/metrics`);
  }
}
