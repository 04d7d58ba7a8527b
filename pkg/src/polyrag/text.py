"""Shared text primitives: word tokens, sentence spans, paragraph spans.

All span helpers return (start, end) offsets into the original string so
callers can keep chunk text verifiable against the source document.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# A sentence ends after . ! ? or the Arabic question mark, when followed by
# whitespace or end of text.
_SENTENCE_END_RE = re.compile(r"[.!?؟](?=\s|$)")

# Paragraph separator: a newline followed by one or more blank lines
# (lines containing only spaces/tabs).
_PARAGRAPH_SEP_RE = re.compile(r"\n(?:[ \t\r]*\n)+")


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric word tokens (Unicode-aware, no underscores)."""
    return _TOKEN_RE.findall(text.lower())


def _terminator_spans(text: str, lo: int, hi: int) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    start = lo
    for match in _SENTENCE_END_RE.finditer(text, lo, hi):
        end = match.end()
        if end <= start:
            continue
        while end < hi and text[end].isspace():
            end += 1
        spans.append((start, end))
        start = end
    if start < hi:
        spans.append((start, hi))
    return spans


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Partition [0, len(text)) into sentence spans.

    A sentence ends at a terminator or at a paragraph break (sentences never
    cross blank lines, so a heading line is its own sentence). Whitespace
    between sentences belongs to the sentence it follows, so the spans tile
    the whole text with no gaps.
    """
    if not text:
        return []
    raw: list[tuple[int, int]] = []
    cursor = 0
    for match in _PARAGRAPH_SEP_RE.finditer(text):
        raw.extend(_terminator_spans(text, cursor, match.start()))
        cursor = match.end()
    raw.extend(_terminator_spans(text, cursor, len(text)))
    if not raw:
        return [(0, len(text))]

    stitched = [[0, raw[0][1]]]
    for start, end in raw[1:]:
        if start > stitched[-1][1]:
            stitched[-1][1] = start
        stitched.append([start, end])
    stitched[-1][1] = len(text)
    return [(s, e) for s, e in stitched]


def paragraph_spans(text: str) -> list[tuple[int, int]]:
    """Spans of paragraphs: maximal segments between blank-line separators.

    Whitespace-only segments are dropped and each span is right-trimmed, so
    a paragraph's text never ends in whitespace.
    """
    raw: list[tuple[int, int]] = []
    pos = 0
    for match in _PARAGRAPH_SEP_RE.finditer(text):
        if match.start() > pos:
            raw.append((pos, match.start()))
        pos = match.end()
    if pos < len(text):
        raw.append((pos, len(text)))

    spans = []
    for start, end in raw:
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append((start, end))
    return spans
