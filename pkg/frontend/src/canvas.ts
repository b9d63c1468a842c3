/** Canvas view model: a pure projection of the session document plus the
 * in-flight request set. No authoritative state lives here, so rebuilding
 * from the same document always reproduces the same canvas. */

import type { Annotation, ImageRef, NodeKind, SessionDocument, SessionNode } from "./types.js";

export const H_SPACING = 340;
export const V_SPACING = 170;

export interface NodeActions {
  canExpand: boolean;
  canShowImages: boolean;
  canReject: boolean;
  canEdit: boolean;
}

export interface CanvasNodeView {
  id: number;
  kind: NodeKind;
  promptText: string;
  x: number;
  y: number;
  depth: number;
  removed: boolean;
  pending: boolean;
  /** Highlight opacities are taken verbatim from the service annotations. */
  highlights: Annotation[];
  images: ImageRef[];
  actions: NodeActions;
}

export interface CanvasModel {
  nodes: CanvasNodeView[];
  width: number;
  height: number;
}

export interface CanvasOptions {
  showRemoved?: boolean;
  inFlight?: ReadonlySet<number>;
}

function actionsFor(
  node: SessionNode,
  childCount: number,
  activeChildCount: number,
  pending: boolean,
): NodeActions {
  if (node.removed || pending) {
    return { canExpand: false, canShowImages: false, canReject: false, canEdit: false };
  }
  const expandable = node.kind === "root" || node.kind === "branch";
  return {
    canExpand: expandable && activeChildCount === 0,
    canShowImages: true,
    canReject: node.kind === "suggestion" && childCount === 0,
    canEdit: node.kind === "suggestion",
  };
}

/**
 * Lay the tree out left-to-right: x follows depth, y follows sibling order
 * (leaves take successive rows, parents center on their children). The
 * layout is deterministic, so identical documents render identically.
 */
export function buildCanvasModel(
  document: SessionDocument,
  options: CanvasOptions = {},
): CanvasModel {
  const showRemoved = options.showRemoved ?? false;
  const inFlight = options.inFlight ?? new Set<number>();

  const byId = new Map<number, SessionNode>();
  const childIds = new Map<number, number[]>();
  let rootId: number | null = null;
  for (const node of document.nodes) {
    byId.set(node.id, node);
    if (node.parent === null) {
      rootId = node.id;
    } else {
      const siblings = childIds.get(node.parent) ?? [];
      siblings.push(node.id);
      childIds.set(node.parent, siblings);
    }
  }
  if (rootId === null) {
    return { nodes: [], width: 0, height: 0 };
  }

  const views: CanvasNodeView[] = [];
  let nextRow = 0;

  const place = (nodeId: number, depth: number): number => {
    const node = byId.get(nodeId)!;
    const children = (childIds.get(nodeId) ?? []).sort((a, b) => a - b);
    const activeChildren = children.filter((id) => !byId.get(id)!.removed);
    const visibleChildren = showRemoved ? children : activeChildren;

    const childRows = visibleChildren.map((id) => place(id, depth + 1));
    const row = childRows.length
      ? childRows.reduce((sum, r) => sum + r, 0) / childRows.length
      : nextRow++;

    const pending = inFlight.has(nodeId);
    views.push({
      id: node.id,
      kind: node.kind,
      promptText: node.prompt_text,
      x: depth * H_SPACING,
      y: row * V_SPACING,
      depth,
      removed: node.removed,
      pending,
      highlights: node.annotations,
      images: node.images,
      actions: actionsFor(node, children.length, activeChildren.length, pending),
    });
    return row;
  };

  place(rootId, 0);
  views.sort((a, b) => a.id - b.id);

  const width = Math.max(...views.map((v) => v.x)) + H_SPACING;
  const height = Math.max(...views.map((v) => v.y)) + V_SPACING;
  return { nodes: views, width, height };
}
