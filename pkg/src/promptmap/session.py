"""Branching exploration history: an append-only tree of prompt nodes.

Nodes are never deleted; removals flip a flag so rejected suggestions
stay on record. Each expanded node keeps its retained candidate pool in
the document, which is what makes remove-and-replace work across
process restarts.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path

from .concreteness import ConcretenessAnnotation, annotate_prompt
from .engine import (
    Candidate,
    ExpansionRequest,
    SuggestionSet,
    select_replacement,
)
from .errors import FormatError, InvalidStateError, NotFoundError, ValidationError

SCHEMA_VERSION = 1


class NodeKind(str, Enum):
    ROOT = "root"
    SUGGESTION = "suggestion"
    BRANCH = "branch"


def utc_clock() -> str:
    return datetime.now(timezone.utc).isoformat()


class LogicalClock:
    """Deterministic clock for mock runs: a fixed epoch plus one second per call."""

    def __init__(self, start: str = "2000-01-01T00:00:00+00:00", start_ticks: int = 0):
        self._epoch = datetime.fromisoformat(start)
        self._ticks = start_ticks

    def __call__(self) -> str:
        stamp = self._epoch + timedelta(seconds=self._ticks)
        self._ticks += 1
        return stamp.isoformat()


@dataclass
class ImageRef:
    uri: str
    provider_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.uri:
            raise ValidationError("image uri must be non-empty")

    def to_dict(self) -> dict:
        return {"uri": self.uri, "provider_meta": self.provider_meta}

    @classmethod
    def from_dict(cls, data: dict) -> "ImageRef":
        return cls(uri=data["uri"], provider_meta=data.get("provider_meta", {}))


@dataclass
class ExpansionState:
    """What a parent remembers about the expansion that made its children."""

    request: ExpansionRequest
    rng_seed: int
    band_halfwidth: float
    band_space: str
    cluster_assignments: dict[int, int]
    retained_pool: list[Candidate]
    removed_pool_indices: list[int] = field(default_factory=list)

    @classmethod
    def from_suggestion_set(cls, sset: SuggestionSet) -> "ExpansionState":
        return cls(
            request=sset.request,
            rng_seed=sset.rng_seed,
            band_halfwidth=sset.band_halfwidth,
            band_space=sset.band_space,
            cluster_assignments=dict(sset.cluster_assignments),
            retained_pool=list(sset.retained_pool),
        )

    def to_dict(self) -> dict:
        return {
            "request": self.request.to_dict(),
            "rng_seed": self.rng_seed,
            "band_halfwidth": self.band_halfwidth,
            "band_space": self.band_space,
            "cluster_assignments": {str(k): v for k, v in self.cluster_assignments.items()},
            "retained_pool": [c.to_dict() for c in self.retained_pool],
            "removed_pool_indices": list(self.removed_pool_indices),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpansionState":
        return cls(
            request=ExpansionRequest.from_dict(data["request"]),
            rng_seed=data["rng_seed"],
            band_halfwidth=data["band_halfwidth"],
            band_space=data.get("band_space", "distance"),
            cluster_assignments={int(k): v for k, v in data["cluster_assignments"].items()},
            retained_pool=[Candidate.from_dict(c) for c in data["retained_pool"]],
            removed_pool_indices=list(data["removed_pool_indices"]),
        )


@dataclass
class GraphNode:
    id: int
    kind: NodeKind
    prompt_text: str
    parent: int | None
    created_at: str
    removed: bool = False
    pool_index: int | None = None
    annotations: list[ConcretenessAnnotation] = field(default_factory=list)
    images: list[ImageRef] = field(default_factory=list)
    expansion: ExpansionState | None = None

    @property
    def request(self) -> ExpansionRequest | None:
        """The request that produced this node's children, if any."""
        return self.expansion.request if self.expansion else None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "prompt_text": self.prompt_text,
            "parent": self.parent,
            "created_at": self.created_at,
            "removed": self.removed,
            "pool_index": self.pool_index,
            "annotations": [a.to_dict() for a in self.annotations],
            "images": [ref.to_dict() for ref in self.images],
            "expansion": self.expansion.to_dict() if self.expansion else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GraphNode":
        return cls(
            id=data["id"],
            kind=NodeKind(data["kind"]),
            prompt_text=data["prompt_text"],
            parent=data["parent"],
            created_at=data["created_at"],
            removed=data["removed"],
            pool_index=data["pool_index"],
            annotations=[ConcretenessAnnotation.from_dict(a) for a in data["annotations"]],
            images=[ImageRef.from_dict(ref) for ref in data["images"]],
            expansion=ExpansionState.from_dict(data["expansion"]) if data["expansion"] else None,
        )


def _default_annotator(prompt: str) -> list[ConcretenessAnnotation]:
    return annotate_prompt(prompt, {})


class Session:
    """One exploration tree. Mutations are single-writer by contract."""

    def __init__(self, annotator=None, clock=None):
        self.annotate = annotator or _default_annotator
        self.clock = clock or utc_clock
        self.nodes: dict[int, GraphNode] = {}
        self.next_id = 1
        self.image_requests: list[int] = []

    # -- helpers ------------------------------------------------------------

    @property
    def root(self) -> GraphNode:
        return next(node for node in self.nodes.values() if node.parent is None)

    def node(self, node_id: int) -> GraphNode:
        node = self.nodes.get(node_id)
        if node is None:
            raise NotFoundError(f"node {node_id} does not exist")
        return node

    def children(self, node_id: int) -> list[GraphNode]:
        return [n for n in self.nodes.values() if n.parent == node_id]

    def active_children(self, node_id: int) -> list[GraphNode]:
        return [n for n in self.children(node_id) if not n.removed]

    def _new_id(self) -> int:
        node_id = self.next_id
        self.next_id += 1
        return node_id

    def _add_node(self, **kwargs) -> GraphNode:
        node = GraphNode(id=self._new_id(), created_at=self.clock(), **kwargs)
        self.nodes[node.id] = node
        return node

    # -- operations ---------------------------------------------------------

    def create_root(self, initial_prompt: str) -> GraphNode:
        if self.nodes:
            raise InvalidStateError("session already has a root")
        prompt = initial_prompt.strip()
        if not prompt:
            raise ValidationError("initial prompt must be non-empty")
        return self._add_node(
            kind=NodeKind.ROOT,
            prompt_text=prompt,
            parent=None,
            annotations=self.annotate(prompt),
        )

    def attach_suggestions(self, parent_id: int, sset: SuggestionSet) -> list[int]:
        """Attach one Suggestion child per set member; records the pool on the parent.

        A parent with live suggestion children cannot be expanded again
        (that would break the four-active-cards rule); once all children
        are removed, a fresh set may replace the exhausted pool.
        """
        parent = self.node(parent_id)
        if parent.removed:
            raise InvalidStateError(f"node {parent_id} was removed")
        if self.active_children(parent_id):
            raise InvalidStateError(f"node {parent_id} already has active suggestions")
        if sset.request is None:
            raise ValidationError("suggestion set carries no request")
        if sset.request.origin_prompt != parent.prompt_text:
            raise ValidationError("suggestion set was built for a different prompt")

        parent.expansion = ExpansionState.from_suggestion_set(sset)
        return [self._attach_candidate(parent, candidate).id for candidate in sset.suggestions]

    def _attach_candidate(self, parent: GraphNode, candidate: Candidate) -> GraphNode:
        return self._add_node(
            kind=NodeKind.SUGGESTION,
            prompt_text=candidate.full_prompt,
            parent=parent.id,
            pool_index=candidate.pool_index,
            annotations=self.annotate(candidate.full_prompt),
        )

    def remove_suggestion(self, node_id: int) -> int:
        """Hide a suggestion and attach its replacement; returns the new node id.

        The removal always sticks; a PoolExhaustedError afterwards means
        no replacement could be drawn (the caller may regenerate).
        """
        node = self.node(node_id)
        if node.kind is not NodeKind.SUGGESTION:
            raise InvalidStateError(f"node {node_id} is not a suggestion")
        if node.removed:
            raise InvalidStateError(f"node {node_id} is already removed")
        if self.children(node_id):
            raise InvalidStateError(f"node {node_id} has children")

        parent = self.node(node.parent)
        state = parent.expansion
        if state is None or node.pool_index is None:
            raise InvalidStateError(f"node {node_id} has no candidate pool to draw from")

        node.removed = True
        state.removed_pool_indices.append(node.pool_index)

        by_index = {c.pool_index: c for c in state.retained_pool}
        removed_candidate = by_index[node.pool_index]
        current = [
            by_index[sibling.pool_index]
            for sibling in self.active_children(parent.id)
            if sibling.pool_index in by_index
        ]
        replacement = select_replacement(
            removed_candidate,
            current,
            state.retained_pool,
            excluded=set(state.removed_pool_indices),
        )
        return self._attach_candidate(parent, replacement).id

    def promote_to_branch(self, node_id: int) -> int:
        """Turn a suggestion into an expandable Branch; no-op on nodes that
        already expand (Root, Branch)."""
        node = self.node(node_id)
        if node.kind in (NodeKind.ROOT, NodeKind.BRANCH):
            return node.id
        if node.removed:
            raise InvalidStateError(f"node {node_id} was removed")
        node.kind = NodeKind.BRANCH
        node.annotations = self.annotate(node.prompt_text)
        return node.id

    def attach_images(self, node_id: int, refs: list[ImageRef]) -> GraphNode:
        node = self.node(node_id)
        if node.removed:
            raise InvalidStateError(f"node {node_id} was removed")
        if len(refs) != 4:
            raise ValidationError(f"a generation event attaches exactly 4 images, got {len(refs)}")
        node.images.extend(refs)
        self.image_requests.append(node_id)
        return node

    def list_tried_prompts(self) -> list[str]:
        """Prompts sent for image generation, in request order, duplicates kept."""
        return [self.nodes[node_id].prompt_text for node_id in self.image_requests]

    # -- persistence ----------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "next_id": self.next_id,
            "image_requests": list(self.image_requests),
            "nodes": [node.to_dict() for node in self.nodes.values()],
        }

    @classmethod
    def from_document(cls, document: dict, annotator=None, clock=None) -> "Session":
        version = document.get("schema_version")
        if version != SCHEMA_VERSION:
            raise FormatError(f"unsupported schema_version: {version!r}")
        session = cls(annotator=annotator, clock=clock)
        roots = 0
        for node_data in document["nodes"]:
            node = GraphNode.from_dict(node_data)
            if node.id in session.nodes:
                raise FormatError(f"duplicate node id {node.id}")
            if (node.parent is None) != (node.kind is NodeKind.ROOT):
                raise FormatError(f"node {node.id}: kind and parent link disagree")
            session.nodes[node.id] = node
            roots += node.parent is None
        if roots != 1:
            raise FormatError(f"document has {roots} roots, expected exactly 1")
        for node in session.nodes.values():
            if node.parent is not None and node.parent not in session.nodes:
                raise FormatError(f"node {node.id} references missing parent {node.parent}")
        _check_acyclic(session)
        session.next_id = document["next_id"]
        for node_id in document["image_requests"]:
            if node_id not in session.nodes:
                raise FormatError(f"image request references missing node {node_id}")
        session.image_requests = list(document["image_requests"])
        return session


def _check_acyclic(session: Session):
    limit = len(session.nodes)
    for node in session.nodes.values():
        current, steps = node, 0
        while current.parent is not None:
            current = session.nodes[current.parent]
            steps += 1
            if steps > limit:
                raise FormatError(f"parent chain from node {node.id} does not reach the root")


def create_session(initial_prompt: str, annotator=None, clock=None) -> Session:
    session = Session(annotator=annotator, clock=clock)
    session.create_root(initial_prompt)
    return session


def serialize(session: Session) -> str:
    return json.dumps(session.to_document(), sort_keys=True, indent=2) + "\n"


def deserialize(text: str, annotator=None, clock=None) -> Session:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"session document is not valid JSON: {exc}") from exc
    return Session.from_document(document, annotator=annotator, clock=clock)


def save_session(session: Session, path: str | Path):
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(serialize(session))
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_session(path: str | Path, annotator=None, clock=None) -> Session:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"session file {path} does not exist")
    return deserialize(path.read_text(encoding="utf-8"), annotator=annotator, clock=clock)
