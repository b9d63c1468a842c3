"""Exploration-diversity measures over a session's tried prompts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HISTOGRAM_BUCKETS = 10


@dataclass
class DiversityReport:
    """Prompt count plus mean pairwise cosine similarity (lower = broader
    exploration). Similarity fields are None below two prompts."""

    prompt_count: int
    mean_pairwise_similarity: float | None
    pair_min: float | None
    pair_max: float | None
    novelty_histogram: list[int] | None  # per 0.1 origin-distance bucket

    def to_dict(self) -> dict:
        return {
            "prompt_count": self.prompt_count,
            "mean_pairwise_similarity": self.mean_pairwise_similarity,
            "pair_min": self.pair_min,
            "pair_max": self.pair_max,
            "novelty_histogram": self.novelty_histogram,
        }

    def to_table(self) -> str:
        rows = [
            ("prompts tried", str(self.prompt_count)),
            ("mean pairwise similarity", _fmt(self.mean_pairwise_similarity)),
            ("min pair similarity", _fmt(self.pair_min)),
            ("max pair similarity", _fmt(self.pair_max)),
        ]
        if self.novelty_histogram is not None:
            for i, count in enumerate(self.novelty_histogram):
                rows.append((f"origin distance {i / 10:.1f}-{(i + 1) / 10:.1f}", str(count)))
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows)


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def diversity_report(prompts: list[str], embedder, origin: str | None = None) -> DiversityReport:
    """Mean cosine similarity over all unordered prompt pairs.

    With an ``origin`` prompt, also buckets each prompt's distance from
    the origin into a 10-bin histogram.
    """
    n = len(prompts)
    histogram = None

    if n == 0:
        return DiversityReport(0, None, None, None, None)

    texts = list(prompts) + ([origin] if origin is not None else [])
    vectors = embedder.embed_texts(texts)
    prompt_vecs = vectors[:n]

    mean = pair_min = pair_max = None
    if n >= 2:
        similarity = prompt_vecs @ prompt_vecs.T
        upper = similarity[np.triu_indices(n, k=1)]
        mean = float(upper.mean())
        pair_min = float(upper.min())
        pair_max = float(upper.max())

    if origin is not None:
        origin_vec = vectors[-1]
        distances = np.clip(1.0 - prompt_vecs @ origin_vec, 0.0, 1.0)
        histogram = [0] * HISTOGRAM_BUCKETS
        for d in distances:
            histogram[min(int(d * HISTOGRAM_BUCKETS), HISTOGRAM_BUCKETS - 1)] += 1

    return DiversityReport(
        prompt_count=n,
        mean_pairwise_similarity=mean,
        pair_min=pair_min,
        pair_max=pair_max,
        novelty_histogram=histogram,
    )
