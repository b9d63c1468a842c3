"""Instruction building, candidate parsing, and span splicing."""

import pytest
from hypothesis import given, strategies as st

from promptmap.engine import (
    ExpansionMode,
    ExpansionRequest,
    SpanSelection,
    build_generation_prompt,
    parse_candidates,
    splice,
)
from promptmap.errors import EmptyPoolError, ValidationError

SCIENTIST_PROMPT = "A scientist character doing an experiment"


def request_for(mode, origin=SCIENTIST_PROMPT, start=2, end=11, novelty=0.5):
    return ExpansionRequest(
        origin_prompt=origin,
        span=SpanSelection.from_offsets(origin, start, end),
        mode=mode,
        novelty=novelty,
    )


class TestBuildGenerationPrompt:
    def test_add_details_markers(self):
        text = build_generation_prompt(request_for(ExpansionMode.ADD_DETAILS))
        assert "Generate 200 variations." in text
        assert "100 Literal Revisions" in text

    def test_alternatives_markers(self):
        text = build_generation_prompt(request_for(ExpansionMode.GENERATE_ALTERNATIVES))
        assert "maintain a related vibe or essence" in text

    def test_index_rendered_inclusive(self):
        # Span [2, 11) covers "scientist"; the filled field prints 2-10.
        request = request_for(ExpansionMode.GENERATE_ALTERNATIVES)
        assert request.span.text == "scientist"
        text = build_generation_prompt(request)
        assert "Index of the Part: 2-10" in text

    def test_fields_filled(self):
        text = build_generation_prompt(request_for(ExpansionMode.ADD_DETAILS))
        assert f"1. Original Prompt: {SCIENTIST_PROMPT}." in text
        assert "2. Part to Change: scientist." in text
        assert "[Insert" not in text and "[Specify" not in text

    def test_novelty_bounds_validated(self):
        with pytest.raises(ValidationError):
            request_for(ExpansionMode.ADD_DETAILS, novelty=1.5)

    def test_span_bounds_validated(self):
        with pytest.raises(ValidationError):
            SpanSelection.from_offsets("abc", 1, 9)
        with pytest.raises(ValidationError):
            SpanSelection.from_offsets("abc", 2, 2)

    def test_span_text_must_match_origin(self):
        with pytest.raises(ValidationError):
            ExpansionRequest(
                origin_prompt="another prompt",
                span=SpanSelection(2, 11, "scientist"),
                mode=ExpansionMode.ADD_DETAILS,
                novelty=0.5,
            )


class TestParseCandidates:
    def test_newline_separated(self):
        raw = "\n".join(f"candidate {i}" for i in range(200))
        assert len(parse_candidates(raw)) == 200

    def test_comma_separated_line(self):
        parsed = parse_candidates("engineer, mathematician, cute astronauts, AI developer")
        assert parsed == ["engineer", "mathematician", "cute astronauts", "AI developer"]

    def test_few_commas_keep_line_whole(self):
        parsed = parse_candidates("a red, rusty robot")
        assert parsed == ["a red, rusty robot"]

    def test_blank_lines_only_is_empty_pool(self):
        with pytest.raises(EmptyPoolError):
            parse_candidates("\n\n  \n")

    def test_list_markers_stripped(self):
        raw = "- engineer\n• dancer\n12. priest\n3) monk\n* wizard"
        assert parse_candidates(raw) == ["engineer", "dancer", "priest", "monk", "wizard"]

    def test_case_insensitive_dedupe_keeps_first(self):
        assert parse_candidates("Engineer\nengineer\nENGINEER\ndancer") == ["Engineer", "dancer"]

    def test_whitespace_trimmed(self):
        assert parse_candidates("  spaced out  \n") == ["spaced out"]


class TestSplice:
    def test_identity(self):
        span = SpanSelection.from_offsets(SCIENTIST_PROMPT, 2, 11)
        assert splice(SCIENTIST_PROMPT, span, span.text) == SCIENTIST_PROMPT

    def test_literal_replacement(self):
        span = SpanSelection.from_offsets(SCIENTIST_PROMPT, 2, 11)
        assert splice(SCIENTIST_PROMPT, span, "engineer") == (
            "A engineer character doing an experiment"
        )

    def test_empty_replacement_shrinks(self):
        span = SpanSelection.from_offsets(SCIENTIST_PROMPT, 2, 11)
        result = splice(SCIENTIST_PROMPT, span, "")
        assert len(result) == len(SCIENTIST_PROMPT) - (span.char_end - span.char_start)

    @given(
        origin=st.text(min_size=1, max_size=60),
        data=st.data(),
        replacement=st.text(max_size=30),
    )
    def test_only_span_region_changes(self, origin, data, replacement):
        start = data.draw(st.integers(0, len(origin) - 1))
        end = data.draw(st.integers(start + 1, len(origin)))
        span = SpanSelection.from_offsets(origin, start, end)
        result = splice(origin, span, replacement)
        assert result[:start] == origin[:start]
        assert result[start:start + len(replacement)] == replacement
        assert result[start + len(replacement):] == origin[end:]
