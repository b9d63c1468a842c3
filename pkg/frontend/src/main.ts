/** Application wiring: document state, in-flight tracking, event handlers.
 * The canvas is always rebuilt from (document, in-flight set); reloading
 * the page reproduces it exactly. */

import { ApiClient, ServiceError } from "./api.js";
import { buildCanvasModel } from "./canvas.js";
import { clearSelection, renderCanvas } from "./render.js";
import { snapSpanToTokens } from "./selection.js";
import { NOVELTY_STOPS, stopToNovelty } from "./slider.js";
import type { ExpansionModeName, SessionDocument } from "./types.js";

interface AppState {
  sessionId: string | null;
  document: SessionDocument | null;
  inFlight: Set<number>;
  showRemoved: boolean;
  mode: ExpansionModeName;
  noveltyStop: number;
}

const state: AppState = {
  sessionId: null,
  document: null,
  inFlight: new Set(),
  showRemoved: false,
  mode: "alt",
  noveltyStop: 2,
};

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");

// At most one mutating request runs per node; later ones queue behind it.
const nodeQueues = new Map<number, Promise<void>>();

function enqueue(nodeId: number, task: () => Promise<void>): void {
  const previous = nodeQueues.get(nodeId) ?? Promise.resolve();
  const next = previous.then(async () => {
    state.inFlight.add(nodeId);
    render();
    try {
      await task();
    } catch (error) {
      reportError(error);
    } finally {
      state.inFlight.delete(nodeId);
      await refresh();
    }
  });
  nodeQueues.set(nodeId, next);
}

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function reportError(error: unknown): void {
  const box = byId<HTMLDivElement>("error");
  if (error instanceof ServiceError) {
    box.textContent = `${error.code}: ${error.message}`;
  } else {
    box.textContent = String(error);
  }
  box.hidden = false;
  window.setTimeout(() => {
    box.hidden = true;
  }, 6000);
}

async function refresh(): Promise<void> {
  if (state.sessionId) {
    state.document = await api.getSession(state.sessionId);
  }
  render();
}

function annotationsOf(nodeId: number) {
  const node = state.document?.nodes.find((n) => n.id === nodeId);
  return node ? node.annotations : [];
}

function render(): void {
  const container = byId<HTMLDivElement>("canvas");
  if (!state.document) {
    container.replaceChildren();
    return;
  }
  const model = buildCanvasModel(state.document, {
    showRemoved: state.showRemoved,
    inFlight: state.inFlight,
  });
  renderCanvas(model, container, {
    onSpanDrag: (nodeId, rawStart, rawEnd) =>
      snapSpanToTokens(annotationsOf(nodeId), rawStart, rawEnd),
    onExpandRequested: (nodeId, span) => {
      const novelty = stopToNovelty(state.noveltyStop);
      enqueue(nodeId, async () => {
        await api.expand(state.sessionId!, nodeId, span, state.mode, novelty);
        clearSelection();
      });
    },
    onShowImages: (nodeId) => {
      enqueue(nodeId, async () => {
        await api.showImages(state.sessionId!, nodeId);
      });
    },
    onNewSuggestion: (nodeId) => {
      enqueue(nodeId, async () => {
        await api.newSuggestion(state.sessionId!, nodeId);
      });
    },
    onEditPrompt: (nodeId) => {
      enqueue(nodeId, async () => {
        await api.editPrompt(state.sessionId!, nodeId);
      });
    },
  });
}

function wireToolbar(): void {
  byId<HTMLFormElement>("new-session").addEventListener("submit", async (event) => {
    event.preventDefault();
    const input = byId<HTMLInputElement>("prompt-input");
    const prompt = input.value.trim();
    if (!prompt) return;
    try {
      const created = await api.createSession(prompt);
      state.sessionId = created.session_id;
      await refresh();
    } catch (error) {
      reportError(error);
    }
  });

  const slider = byId<HTMLInputElement>("novelty");
  slider.max = String(NOVELTY_STOPS.length - 1);
  slider.value = String(state.noveltyStop);
  slider.addEventListener("input", () => {
    state.noveltyStop = Number(slider.value);
    byId<HTMLSpanElement>("novelty-value").textContent =
      stopToNovelty(state.noveltyStop).toFixed(2);
  });

  for (const radio of document.querySelectorAll<HTMLInputElement>("input[name=mode]")) {
    radio.addEventListener("change", () => {
      if (radio.checked) {
        state.mode = radio.value as ExpansionModeName;
      }
    });
  }

  byId<HTMLInputElement>("show-removed").addEventListener("change", (event) => {
    state.showRemoved = (event.target as HTMLInputElement).checked;
    render();
  });
}

wireToolbar();
render();
