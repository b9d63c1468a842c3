/** DOM renderer for the canvas model. Rebuilt wholesale on every state
 * change; the model is small enough that diffing would buy nothing. */

import type { CanvasModel, CanvasNodeView } from "./canvas.js";
import type { SpanRange } from "./selection.js";

export interface CanvasCallbacks {
  onExpandRequested(nodeId: number, span: SpanRange): void;
  onShowImages(nodeId: number): void;
  onNewSuggestion(nodeId: number): void;
  onEditPrompt(nodeId: number): void;
  onSpanDrag(nodeId: number, rawStart: number, rawEnd: number): SpanRange | null;
}

const HIGHLIGHT_RGB = "46, 164, 79"; // green; opacity carries the signal

interface DragState {
  nodeId: number;
  anchorStart: number;
  anchorEnd: number;
}

let drag: DragState | null = null;
let currentSelection: { nodeId: number; span: SpanRange } | null = null;

export function selectedSpan(): { nodeId: number; span: SpanRange } | null {
  return currentSelection;
}

export function clearSelection(): void {
  currentSelection = null;
}

function renderPrompt(
  node: CanvasNodeView,
  container: HTMLElement,
  callbacks: CanvasCallbacks,
): void {
  const text = node.promptText;
  let cursor = 0;
  for (const annotation of node.highlights) {
    if (annotation.char_start > cursor) {
      container.appendChild(
        document.createTextNode(text.slice(cursor, annotation.char_start)),
      );
    }
    const span = document.createElement("span");
    span.className = "token";
    span.textContent = text.slice(annotation.char_start, annotation.char_end);
    span.style.backgroundColor = `rgba(${HIGHLIGHT_RGB}, ${annotation.opacity})`;
    span.dataset.start = String(annotation.char_start);
    span.dataset.end = String(annotation.char_end);
    span.addEventListener("mousedown", (event) => {
      event.preventDefault();
      drag = {
        nodeId: node.id,
        anchorStart: annotation.char_start,
        anchorEnd: annotation.char_end,
      };
    });
    span.addEventListener("mouseup", () => {
      if (!drag || drag.nodeId !== node.id) {
        drag = null;
        return;
      }
      const rawStart = Math.min(drag.anchorStart, annotation.char_start);
      const rawEnd = Math.max(drag.anchorEnd, annotation.char_end);
      const snapped = callbacks.onSpanDrag(node.id, rawStart, rawEnd);
      currentSelection = snapped ? { nodeId: node.id, span: snapped } : null;
      drag = null;
    });
    container.appendChild(span);
    cursor = annotation.char_end;
  }
  if (cursor < text.length) {
    container.appendChild(document.createTextNode(text.slice(cursor)));
  }
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const element = document.createElement("button");
  element.textContent = label;
  element.addEventListener("click", onClick);
  return element;
}

function renderNode(node: CanvasNodeView, callbacks: CanvasCallbacks): HTMLElement {
  const card = document.createElement("div");
  card.className = `node node-${node.kind}${node.removed ? " node-removed" : ""}`;
  card.style.left = `${node.x}px`;
  card.style.top = `${node.y}px`;
  card.dataset.nodeId = String(node.id);

  const prompt = document.createElement("p");
  prompt.className = "prompt";
  renderPrompt(node, prompt, callbacks);
  card.appendChild(prompt);

  if (node.pending) {
    const badge = document.createElement("span");
    badge.className = "pending";
    badge.textContent = "working…";
    card.appendChild(badge);
  }

  if (node.images.length) {
    const strip = document.createElement("div");
    strip.className = "thumbs";
    for (const image of node.images) {
      const thumb = document.createElement("img");
      thumb.src = image.uri;
      thumb.alt = node.promptText;
      strip.appendChild(thumb);
    }
    card.appendChild(strip);
  }

  const actions = document.createElement("div");
  actions.className = "actions";
  if (node.actions.canShowImages) {
    actions.appendChild(button("Show Image", () => callbacks.onShowImages(node.id)));
  }
  if (node.actions.canReject) {
    actions.appendChild(button("New Suggestion", () => callbacks.onNewSuggestion(node.id)));
  }
  if (node.actions.canEdit) {
    actions.appendChild(button("Edit Prompt", () => callbacks.onEditPrompt(node.id)));
  }
  if (node.actions.canExpand) {
    actions.appendChild(
      button("Expand", () => {
        const selection = currentSelection;
        if (selection && selection.nodeId === node.id) {
          callbacks.onExpandRequested(node.id, selection.span);
        }
      }),
    );
  }
  card.appendChild(actions);
  return card;
}

export function renderCanvas(
  model: CanvasModel,
  container: HTMLElement,
  callbacks: CanvasCallbacks,
): void {
  container.replaceChildren();
  container.style.width = `${model.width}px`;
  container.style.height = `${model.height}px`;
  for (const node of model.nodes) {
    container.appendChild(renderNode(node, callbacks));
  }
}
