"""Shared fixtures: a small lexicon file, mock provider bundles, and
helpers for building synthetic candidate pools."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from promptmap.concreteness import load_lexicon
from promptmap.engine import Candidate
from promptmap.providers import (
    EmbeddingClient,
    MockChatProvider,
    MockEmbeddingProvider,
    MockImageProvider,
    Providers,
)

DATA_DIR = Path(__file__).parent / "data"

LEXICON_ROWS = {
    "a": 1.46,
    "drawing": 4.28,
    "of": 1.7,
    "soft": 3.82,
    "cloud": 4.54,
    "robot": 4.76,
    "mascot": 4.04,
    "character": 2.79,
    "music": 4.31,
    "festival": 4.0,
    "vague": 1.0,
    "rock": 5.0,
}


@pytest.fixture
def lexicon_file(tmp_path):
    path = tmp_path / "lexicon.tsv"
    rows = "\n".join(f"{word}\t{rating}" for word, rating in LEXICON_ROWS.items())
    path.write_text(f"Word\tConc.M\n{rows}\n", encoding="utf-8")
    return path


@pytest.fixture
def lexicon(lexicon_file):
    return load_lexicon(lexicon_file)


@pytest.fixture
def chat_fixture_text():
    return (DATA_DIR / "chat_fixture_200.txt").read_text(encoding="utf-8")


def make_mock_providers(tmp_path, seed=0, dim=16, register=None) -> Providers:
    chat = MockChatProvider(seed=seed)
    if register:
        for instruction, text in register.items():
            chat.register(instruction, text)
    embedder = EmbeddingClient(MockEmbeddingProvider(dim=dim, seed=seed))
    images = MockImageProvider(tmp_path / "images", seed=seed)
    return Providers(chat=chat, embedder=embedder, images=images)


@pytest.fixture
def mock_providers(tmp_path):
    return make_mock_providers(tmp_path)


def unit_rows(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    return matrix / np.linalg.norm(matrix, axis=1, keepdims=True)


def candidates_from_vectors(vectors, origin_vec=None, distances=None) -> list[Candidate]:
    """Synthetic pool: one candidate per (already unit-norm) row."""
    vectors = np.asarray(vectors, dtype=np.float64)
    out = []
    for i, vec in enumerate(vectors):
        if distances is not None:
            distance = float(distances[i])
        elif origin_vec is not None:
            distance = float(np.clip(1.0 - vec @ origin_vec, 0.0, 1.0))
        else:
            distance = 0.0
        out.append(
            Candidate(
                pool_index=i,
                span_text=f"cand {i}",
                full_prompt=f"prompt variant {i}",
                embedding=vec,
                origin_distance=distance,
            )
        )
    return out


def candidates_with_distances(distances) -> list[Candidate]:
    """Pool where only origin_distance matters; embeddings are 2-D placeholders."""
    vectors = unit_rows([[1.0, float(i + 1)] for i in range(len(distances))])
    return candidates_from_vectors(vectors, distances=list(distances))


def make_suggestion_set(prompt: str, pool_size: int = 8, seed: int = 0, novelty: float = 0.5):
    """A ready-to-attach suggestion set over the prompt's first word."""
    from promptmap.engine import (
        ExpansionMode,
        ExpansionRequest,
        SpanSelection,
        build_pool,
        cluster_and_select,
    )

    first_word_end = len(prompt.split()[0])
    request = ExpansionRequest(
        origin_prompt=prompt,
        span=SpanSelection.from_offsets(prompt, 0, first_word_end),
        mode=ExpansionMode.GENERATE_ALTERNATIVES,
        novelty=novelty,
    )
    embedder = EmbeddingClient(MockEmbeddingProvider(dim=8, seed=seed))
    pool = build_pool(request, [f"variant{i}" for i in range(pool_size)], embedder)
    return cluster_and_select(pool, k=4, seed=seed, request=request, band_halfwidth=1.0)
