/** Wire types mirroring the /v1 session document. Field names match the
 * service JSON exactly; the UI never derives its own versions of them. */

export type NodeKind = "root" | "suggestion" | "branch";

export interface Annotation {
  token: string;
  char_start: number;
  char_end: number;
  rating: number | null;
  opacity: number;
}

export interface ImageRef {
  uri: string;
  provider_meta: Record<string, unknown>;
}

export interface SessionNode {
  id: number;
  kind: NodeKind;
  prompt_text: string;
  parent: number | null;
  created_at: string;
  removed: boolean;
  pool_index: number | null;
  annotations: Annotation[];
  images: ImageRef[];
  expansion: unknown | null;
}

export interface SessionDocument {
  schema_version: number;
  next_id: number;
  image_requests: number[];
  nodes: SessionNode[];
}

export interface ApiError {
  code: string;
  message: string;
  retryable: boolean;
}

export type ExpansionModeName = "detail" | "alt";
