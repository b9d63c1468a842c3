"""Span-expansion pipeline.

One expand call runs: instruction build -> chat provider -> candidate
parsing -> splice into full prompts -> batch embedding -> novelty-band
filter -> k-means (k=4) -> one representative per cluster. Removals are
backfilled by an argmax over summed cosine distances to the removed
suggestion and the surviving ones.

All pipeline functions are pure given (request, pool, seed).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import EngineConfig
from .errors import EmptyPoolError, PoolExhaustedError, ValidationError
from .providers import ChatRequest, Providers
from .templates import (
    ADD_DETAILS_INSTRUCTION,
    ALTERNATIVES_INSTRUCTION,
    INDEX_FIELD,
    ORIGINAL_PROMPT_FIELD,
    PART_FIELD,
)

logger = logging.getLogger(__name__)


class ExpansionMode(str, Enum):
    ADD_DETAILS = "add_details"
    GENERATE_ALTERNATIVES = "generate_alternatives"


@dataclass(frozen=True)
class SpanSelection:
    """Half-open [char_start, char_end) slice of the origin prompt."""

    char_start: int
    char_end: int
    text: str

    @classmethod
    def from_offsets(cls, origin: str, char_start: int, char_end: int) -> "SpanSelection":
        if not (0 <= char_start < char_end <= len(origin)):
            raise ValidationError(
                f"span {char_start}:{char_end} out of bounds for prompt of length {len(origin)}"
            )
        return cls(char_start, char_end, origin[char_start:char_end])

    def to_dict(self) -> dict:
        return {"char_start": self.char_start, "char_end": self.char_end, "text": self.text}


@dataclass(frozen=True)
class ExpansionRequest:
    origin_prompt: str
    span: SpanSelection
    mode: ExpansionMode
    novelty: float

    def __post_init__(self):
        if not (0.0 <= self.novelty <= 1.0):
            raise ValidationError(f"novelty must lie in [0, 1], got {self.novelty}")
        span = self.span
        if not (0 <= span.char_start < span.char_end <= len(self.origin_prompt)):
            raise ValidationError(
                f"span {span.char_start}:{span.char_end} out of bounds for origin prompt"
            )
        if self.origin_prompt[span.char_start:span.char_end] != span.text:
            raise ValidationError("span text does not match the origin prompt slice")

    def to_dict(self) -> dict:
        return {
            "origin_prompt": self.origin_prompt,
            "char_start": self.span.char_start,
            "char_end": self.span.char_end,
            "span_text": self.span.text,
            "mode": self.mode.value,
            "novelty": self.novelty,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpansionRequest":
        span = SpanSelection(data["char_start"], data["char_end"], data["span_text"])
        return cls(
            origin_prompt=data["origin_prompt"],
            span=span,
            mode=ExpansionMode(data["mode"]),
            novelty=data["novelty"],
        )


@dataclass
class Candidate:
    """One span rewrite with its full-prompt embedding.

    ``pool_index`` is the candidate's position in the parsed pool and is
    the tie-breaker everywhere: lower index wins.
    """

    pool_index: int
    span_text: str
    full_prompt: str
    embedding: np.ndarray
    origin_distance: float

    def to_dict(self) -> dict:
        return {
            "pool_index": self.pool_index,
            "span_text": self.span_text,
            "full_prompt": self.full_prompt,
            "embedding": [float(x) for x in self.embedding],
            "origin_distance": self.origin_distance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Candidate":
        return cls(
            pool_index=data["pool_index"],
            span_text=data["span_text"],
            full_prompt=data["full_prompt"],
            embedding=np.asarray(data["embedding"], dtype=np.float64),
            origin_distance=data["origin_distance"],
        )


@dataclass
class SuggestionSet:
    """Four cluster representatives plus the pool they were chosen from."""

    suggestions: list[Candidate]
    cluster_assignments: dict[int, int]  # pool_index -> cluster id
    retained_pool: list[Candidate]
    request: ExpansionRequest | None
    rng_seed: int
    band_halfwidth: float
    band_space: str = "distance"


def build_generation_prompt(request: ExpansionRequest) -> str:
    """Fill the mode's instruction template with the request's three fields.

    The index range is rendered end-inclusive (the convention used by the
    templates' worked examples), so span [2, 11) prints as "2-10".
    """
    template = (
        ADD_DETAILS_INSTRUCTION
        if request.mode is ExpansionMode.ADD_DETAILS
        else ALTERNATIVES_INSTRUCTION
    )
    span = request.span
    return (
        template
        .replace(ORIGINAL_PROMPT_FIELD, request.origin_prompt)
        .replace(PART_FIELD, span.text)
        .replace(INDEX_FIELD, f"{span.char_start}-{span.char_end - 1}")
    )


_LIST_MARKER_RE = re.compile(r"^\s*(?:[-*•·]+|\d+[.)])\s*")


def _strip_markers(piece: str) -> str:
    piece = piece.strip()
    while True:
        stripped = _LIST_MARKER_RE.sub("", piece, count=1)
        if stripped == piece:
            return piece
        piece = stripped.strip()


def parse_candidates(raw: str) -> list[str]:
    """Extract span rewrites from a raw chat response.

    One candidate per line; lines carrying three or more commas are
    treated as comma-separated lists. List markers and numbering are
    trimmed; duplicates are dropped case-insensitively, first one wins.
    """
    candidates: list[str] = []
    seen: set[str] = set()
    for line in raw.splitlines():
        line = _strip_markers(line)
        if not line:
            continue
        pieces = line.split(",") if line.count(",") >= 3 else [line]
        for piece in pieces:
            piece = _strip_markers(piece)
            if not piece:
                continue
            key = piece.lower()
            if key in seen:
                continue
            seen.add(key)
            candidates.append(piece)
    if not candidates:
        raise EmptyPoolError("no candidates parsed from the response")
    return candidates


def splice(origin: str, span: SpanSelection, replacement: str) -> str:
    """Replace the span's slice of ``origin`` with ``replacement``, verbatim."""
    return origin[:span.char_start] + replacement + origin[span.char_end:]


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - dot product; inputs are unit-norm."""
    return float(1.0 - np.dot(a, b))


def build_pool(request: ExpansionRequest, span_texts: list[str], embedder) -> list[Candidate]:
    """Splice every rewrite into a full prompt and embed the batch.

    origin_distance is (1 - cosine to the origin prompt) clamped to [0, 1].
    """
    if not span_texts:
        raise EmptyPoolError("cannot build a pool from zero candidates")
    full_prompts = [splice(request.origin_prompt, request.span, text) for text in span_texts]
    vectors = embedder.embed_texts([request.origin_prompt] + full_prompts)
    origin_vec = vectors[0]
    distances = np.clip(1.0 - vectors[1:] @ origin_vec, 0.0, 1.0)
    return [
        Candidate(
            pool_index=i,
            span_text=span_texts[i],
            full_prompt=full_prompts[i],
            embedding=vectors[1 + i],
            origin_distance=float(distances[i]),
        )
        for i in range(len(span_texts))
    ]


def novelty_filter(
    pool: list[Candidate],
    novelty: float,
    *,
    band_halfwidth: float = 0.2,
    widen_step: float = 0.1,
    min_retained: int = 4,
    band_space: str = "distance",
) -> tuple[list[Candidate], float]:
    """Retain candidates whose origin distance sits within novelty +- band.

    A band that keeps fewer than ``min_retained`` candidates widens in
    ``widen_step`` increments until enough survive or the band covers
    [0, 1]. Returns (retained candidates, final half-width).
    """
    if not pool:
        raise EmptyPoolError("novelty filter received an empty pool")
    if widen_step <= 0:
        raise ValidationError("widen_step must be positive")
    if band_space not in ("distance", "similarity"):
        raise ValidationError(f"unknown band_space: {band_space}")

    if band_space == "distance":
        values = [c.origin_distance for c in pool]
    else:
        values = [1.0 - c.origin_distance for c in pool]

    halfwidth = band_halfwidth
    while True:
        retained = [c for c, v in zip(pool, values) if abs(v - novelty) <= halfwidth]
        full_cover = novelty - halfwidth <= 0.0 and novelty + halfwidth >= 1.0
        if len(retained) >= min_retained or full_cover:
            if halfwidth > band_halfwidth:
                logger.info(
                    "novelty band widened to +-%.2f (retained %d)", halfwidth, len(retained)
                )
            return retained, halfwidth
        halfwidth += widen_step


def _kmeans(points: np.ndarray, k: int, seed: int, max_iters: int) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm with k-means++ seeding on unit-norm rows.

    Squared Euclidean on unit vectors is monotone in cosine distance, so
    this clusters by semantic similarity. Converges when assignments
    stop changing; empty clusters steal the point farthest from its
    centroid.
    """
    rng = np.random.default_rng(seed)
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest_sq = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total > 0.0:
            idx = rng.choice(n, p=closest_sq / total)
        else:
            idx = rng.integers(n)
        centers[j] = points[idx]
        closest_sq = np.minimum(closest_sq, np.sum((points - centers[j]) ** 2, axis=1))

    assignments = np.full(n, -1)
    for _ in range(max_iters):
        sq_dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assignments = sq_dists.argmin(axis=1)
        for j in range(k):
            if not np.any(new_assignments == j):
                own = sq_dists[np.arange(n), new_assignments]
                farthest = int(np.argmax(own))
                new_assignments[farthest] = j
                sq_dists[farthest, :] = -1.0  # keep it pinned if more clusters empty out
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for j in range(k):
            centers[j] = points[assignments == j].mean(axis=0)
    return assignments, centers


def cluster_and_select(
    retained: list[Candidate],
    k: int = 4,
    seed: int = 0,
    *,
    max_iters: int = 100,
    request: ExpansionRequest | None = None,
    band_halfwidth: float = 0.2,
    band_space: str = "distance",
) -> SuggestionSet:
    """Cluster the retained pool and surface one member per cluster.

    Suggestions are always actual pool members, each the candidate
    nearest its cluster centroid (ties break to the lowest pool index).
    Pools of size <= k degenerate to one suggestion per candidate.
    """
    if not retained:
        raise EmptyPoolError("cannot select suggestions from an empty pool")

    if len(retained) <= k:
        assignments = {c.pool_index: i for i, c in enumerate(retained)}
        suggestions = list(retained)
    else:
        points = np.stack([c.embedding for c in retained])
        labels, centers = _kmeans(points, k, seed, max_iters)
        assignments = {c.pool_index: int(labels[i]) for i, c in enumerate(retained)}
        suggestions = []
        for j in range(k):
            members = np.flatnonzero(labels == j)
            sq = ((points[members] - centers[j]) ** 2).sum(axis=1)
            suggestions.append(retained[int(members[int(np.argmin(sq))])])

    return SuggestionSet(
        suggestions=suggestions,
        cluster_assignments=assignments,
        retained_pool=retained,
        request=request,
        rng_seed=seed,
        band_halfwidth=band_halfwidth,
        band_space=band_space,
    )


def select_replacement(
    removed: Candidate,
    current: list[Candidate],
    retained: list[Candidate],
    excluded: set[int] | frozenset[int] = frozenset(),
) -> Candidate:
    """Pick the pool member maximizing summed cosine distance to the
    removed suggestion and every current one.

    ``excluded`` holds pool indices already removed from this node's
    suggestion history; they never come back. Ties break to the lowest
    pool index.
    """
    ineligible = {removed.pool_index, *(c.pool_index for c in current), *excluded}
    eligible = [c for c in retained if c.pool_index not in ineligible]
    if not eligible:
        raise PoolExhaustedError("no eligible replacement candidate remains in the pool")

    matrix = np.stack([c.embedding for c in eligible])
    references = np.stack([removed.embedding] + [c.embedding for c in current])
    scores = (1.0 - matrix @ references.T).sum(axis=1)
    return eligible[int(np.argmax(scores))]


def expand(
    request: ExpansionRequest,
    providers: Providers,
    seed: int = 0,
    config: EngineConfig | None = None,
) -> SuggestionSet:
    """Run the full pipeline for one expansion request."""
    cfg = config or EngineConfig()
    instruction = build_generation_prompt(request)
    response = providers.chat.chat(ChatRequest(instruction=instruction))
    span_texts = parse_candidates(response.text)
    if len(span_texts) < cfg.candidate_target:
        logger.warning(
            "candidate pool short: parsed %d of %d", len(span_texts), cfg.candidate_target
        )
    pool = build_pool(request, span_texts, providers.embedder)
    retained, band = novelty_filter(
        pool,
        request.novelty,
        band_halfwidth=cfg.band_halfwidth,
        widen_step=cfg.widen_step,
        min_retained=cfg.k,
        band_space=cfg.band_space,
    )
    return cluster_and_select(
        retained,
        k=cfg.k,
        seed=seed,
        max_iters=cfg.max_kmeans_iters,
        request=request,
        band_halfwidth=band,
        band_space=cfg.band_space,
    )
