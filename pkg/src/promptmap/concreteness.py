"""Word-concreteness scoring against a ratings lexicon.

Ratings live on a 1-5 scale (5 = most concrete). Prompts are annotated
token by token and each rating is mapped to a green-highlight opacity so
vague words show up strongest: opacity = (5 - rating) / 4.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError

logger = logging.getLogger(__name__)

RATING_MIN = 1.0
RATING_MAX = 5.0

WORD_COLUMN = "word"
RATING_COLUMNS = ("conc.m", "concreteness", "conc_m", "rating", "mean")

# Maximal runs of letters, allowing internal apostrophes/hyphens
# ("state-of-the-art", "o'clock"). Digits and underscores never match.
_TOKEN_RE = re.compile(r"[^\W\d_]+(?:['’-][^\W\d_]+)*")


class Lexicon(dict):
    """word -> rating map; remembers how many source rows were skipped."""

    skipped_rows: int = 0


@dataclass(frozen=True)
class ConcretenessAnnotation:
    """One scored token of a prompt.

    rating is None for out-of-vocabulary tokens, which get opacity 0.0
    (no highlight) rather than a guessed score.
    """

    token: str
    char_start: int
    char_end: int
    rating: float | None
    opacity: float

    def to_dict(self) -> dict:
        return {
            "token": self.token,
            "char_start": self.char_start,
            "char_end": self.char_end,
            "rating": self.rating,
            "opacity": self.opacity,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConcretenessAnnotation":
        return cls(
            token=data["token"],
            char_start=data["char_start"],
            char_end=data["char_end"],
            rating=data["rating"],
            opacity=data["opacity"],
        )


def _detect_delimiter(header_line: str) -> str:
    counts = {delim: header_line.count(delim) for delim in ("\t", ",", ";")}
    best = max(counts, key=counts.get)
    return best if counts[best] > 0 else "\t"


def load_lexicon(source: str | Path | io.TextIOBase) -> Lexicon:
    """Load a word -> concreteness-rating map from delimiter-separated text.

    The header row must contain a word column and a mean-concreteness
    column (delimiter auto-detected among tab/comma/semicolon). Rows with
    unparseable or out-of-range ratings are skipped and counted on the
    returned map's ``skipped_rows``. Duplicate words keep the first
    occurrence; words are lowercased.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _parse_lexicon(fh)
    return _parse_lexicon(source)


def _parse_lexicon(fh) -> Lexicon:
    header_line = fh.readline()
    if not header_line.strip():
        raise FormatError("lexicon file has no header row")
    delimiter = _detect_delimiter(header_line)
    columns = [col.strip().lower() for col in header_line.rstrip("\n\r").split(delimiter)]

    if WORD_COLUMN not in columns:
        raise FormatError("lexicon header is missing the 'Word' column", columns=columns)
    word_idx = columns.index(WORD_COLUMN)
    rating_idx = next((columns.index(c) for c in RATING_COLUMNS if c in columns), None)
    if rating_idx is None:
        raise FormatError(
            "lexicon header is missing a mean-concreteness column "
            f"(expected one of {', '.join(RATING_COLUMNS)})",
            columns=columns,
        )

    lexicon = Lexicon()
    skipped = 0
    for line in fh:
        if not line.strip():
            continue
        parts = line.rstrip("\n\r").split(delimiter)
        if len(parts) <= max(word_idx, rating_idx):
            skipped += 1
            continue
        word = parts[word_idx].strip().lower()
        try:
            rating = float(parts[rating_idx])
        except ValueError:
            skipped += 1
            continue
        if not word or any(ch.isspace() for ch in word) or not (RATING_MIN <= rating <= RATING_MAX):
            skipped += 1
            continue
        if word not in lexicon:
            lexicon[word] = rating
    lexicon.skipped_rows = skipped
    if skipped:
        logger.warning("lexicon load skipped %d unparseable rows", skipped)
    return lexicon


def tokenize(prompt: str) -> list[tuple[str, int, int]]:
    """Split a prompt into (token, char_start, char_end) triples.

    Offsets index the original string with exclusive ends, so
    ``prompt[start:end] == token`` always holds.
    """
    return [(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(prompt)]


def opacity_for(rating: float) -> float:
    """Highlight alpha for a rating: 1.0 at rating 1 down to 0.0 at rating 5."""
    return (RATING_MAX - rating) / (RATING_MAX - RATING_MIN)


def lookup_rating(token: str, lexicon: dict) -> float | None:
    """Exact lowercase lookup, then a naive singular (strip trailing 's')."""
    word = token.lower()
    rating = lexicon.get(word)
    if rating is None and len(word) > 3 and word.endswith("s"):
        rating = lexicon.get(word[:-1])
    return rating


def annotate_prompt(prompt: str, lexicon: dict) -> list[ConcretenessAnnotation]:
    """Score each token of ``prompt`` against ``lexicon``.

    Returns one annotation per token, sorted by char_start and
    non-overlapping. Out-of-vocabulary tokens carry rating None and
    opacity 0.0.
    """
    annotations = []
    for token, start, end in tokenize(prompt):
        rating = lookup_rating(token, lexicon)
        opacity = opacity_for(rating) if rating is not None else 0.0
        annotations.append(
            ConcretenessAnnotation(
                token=token, char_start=start, char_end=end, rating=rating, opacity=opacity
            )
        )
    return annotations
