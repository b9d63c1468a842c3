/** Span selection: raw drag ranges snap outward to token boundaries.
 * Sub-word spans are never meaningful, so a drag that clips into a token
 * claims the whole token. */

import type { Annotation } from "./types.js";

export interface SpanRange {
  char_start: number;
  char_end: number;
}

/**
 * Snap a raw character range to the smallest token-aligned range covering
 * it. Returns null when the range touches no token (e.g. a drag across
 * whitespace only, or a zero-length click).
 */
export function snapSpanToTokens(
  annotations: readonly Annotation[],
  rawStart: number,
  rawEnd: number,
): SpanRange | null {
  const start = Math.min(rawStart, rawEnd);
  const end = Math.max(rawStart, rawEnd);
  if (start === end) {
    return null;
  }
  let snappedStart = Infinity;
  let snappedEnd = -Infinity;
  for (const token of annotations) {
    const overlaps = token.char_start < end && token.char_end > start;
    if (overlaps) {
      snappedStart = Math.min(snappedStart, token.char_start);
      snappedEnd = Math.max(snappedEnd, token.char_end);
    }
  }
  if (snappedStart === Infinity) {
    return null;
  }
  return { char_start: snappedStart, char_end: snappedEnd };
}
