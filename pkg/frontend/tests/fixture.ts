/** A 10-node session document: root with four active suggestions (one
 * removed and replaced), one suggestion promoted to a branch and expanded. */

import type { Annotation, SessionDocument, SessionNode } from "../src/types.js";

function tok(
  token: string,
  char_start: number,
  char_end: number,
  rating: number | null,
  opacity: number,
): Annotation {
  return { token, char_start, char_end, rating, opacity };
}

function node(partial: Partial<SessionNode> & Pick<SessionNode, "id" | "kind">): SessionNode {
  return {
    prompt_text: "",
    parent: null,
    created_at: "2000-01-01T00:00:00+00:00",
    removed: false,
    pool_index: null,
    annotations: [],
    images: [],
    expansion: null,
    ...partial,
  };
}

// Root prompt: "A soft cloud" — opacities straight off the rating formula.
export const ROOT_ANNOTATIONS: Annotation[] = [
  tok("A", 0, 1, 1.46, 0.885),
  tok("soft", 2, 6, 3.82, 0.295),
  tok("cloud", 7, 12, 4.54, 0.115),
];

export const FIXTURE_DOCUMENT: SessionDocument = {
  schema_version: 1,
  next_id: 11,
  image_requests: [1, 2],
  nodes: [
    node({
      id: 1,
      kind: "root",
      prompt_text: "A soft cloud",
      annotations: ROOT_ANNOTATIONS,
      images: [
        { uri: "images/root_0.png", provider_meta: {} },
        { uri: "images/root_1.png", provider_meta: {} },
        { uri: "images/root_2.png", provider_meta: {} },
        { uri: "images/root_3.png", provider_meta: {} },
      ],
      expansion: {},
    }),
    node({
      id: 2,
      kind: "branch",
      prompt_text: "A fluffy cumulus",
      parent: 1,
      pool_index: 0,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("fluffy", 2, 8, null, 0.0),
                    tok("cumulus", 9, 16, null, 0.0)],
      images: [
        { uri: "images/n2_0.png", provider_meta: {} },
        { uri: "images/n2_1.png", provider_meta: {} },
        { uri: "images/n2_2.png", provider_meta: {} },
        { uri: "images/n2_3.png", provider_meta: {} },
      ],
      expansion: {},
    }),
    node({
      id: 3,
      kind: "suggestion",
      prompt_text: "A cotton wisp",
      parent: 1,
      pool_index: 1,
      removed: true,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("cotton", 2, 8, 4.9, 0.025),
                    tok("wisp", 9, 13, null, 0.0)],
    }),
    node({
      id: 4,
      kind: "suggestion",
      prompt_text: "A drifting haze",
      parent: 1,
      pool_index: 2,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("drifting", 2, 10, null, 0.0),
                    tok("haze", 11, 15, 3.31, 0.4225)],
    }),
    node({
      id: 5,
      kind: "suggestion",
      prompt_text: "A silver mist",
      parent: 1,
      pool_index: 3,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("silver", 2, 8, 4.2, 0.2),
                    tok("mist", 9, 13, 4.1, 0.225)],
    }),
    node({
      id: 6,
      kind: "suggestion",
      prompt_text: "A glowing nebula",
      parent: 1,
      pool_index: 7,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("glowing", 2, 9, 3.61, 0.3475),
                    tok("nebula", 10, 16, null, 0.0)],
    }),
    node({
      id: 7,
      kind: "suggestion",
      prompt_text: "A fluffy thunderhead",
      parent: 2,
      pool_index: 0,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("fluffy", 2, 8, null, 0.0),
                    tok("thunderhead", 9, 20, null, 0.0)],
    }),
    node({
      id: 8,
      kind: "suggestion",
      prompt_text: "A fluffy contrail",
      parent: 2,
      pool_index: 1,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("fluffy", 2, 8, null, 0.0),
                    tok("contrail", 9, 17, null, 0.0)],
    }),
    node({
      id: 9,
      kind: "suggestion",
      prompt_text: "A fluffy fogbank",
      parent: 2,
      pool_index: 2,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("fluffy", 2, 8, null, 0.0),
                    tok("fogbank", 9, 16, null, 0.0)],
    }),
    node({
      id: 10,
      kind: "suggestion",
      prompt_text: "A fluffy snowdrift",
      parent: 2,
      pool_index: 3,
      annotations: [tok("A", 0, 1, 1.46, 0.885), tok("fluffy", 2, 8, null, 0.0),
                    tok("snowdrift", 9, 18, null, 0.0)],
    }),
  ],
};
