"""Document chunking under five strategies.

Every chunker is a pure function of (text, params, lexicons) returning
Chunk objects with ordinal, gapless chunk ids. All strategies except Topic
are span-preserving: chunk.text is exactly the document slice at
[char_start, char_end). Topic chunks concatenate paragraphs that may not be
contiguous, so their span only brackets the covered region.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from math import sqrt

from .text import paragraph_spans, sentence_spans, tokenize


class ChunkingError(Exception):
    pass


class Strategy(str, Enum):
    FIXED_WINDOW = "fixed"
    PARAGRAPH = "paragraph"
    SEMANTIC_UNIT = "semantic"
    TOPIC = "topic"
    ENTITY = "entity"


@dataclass(frozen=True)
class ChunkParams:
    size: int = 1000
    overlap: int = 200
    max_size: int | None = None  # cap before a unit is re-split; defaults to size

    def __post_init__(self) -> None:
        if self.size <= 0:
            raise ChunkingError(f"size must be positive, got {self.size}")
        if not 0 <= self.overlap < self.size:
            raise ChunkingError(
                f"overlap must satisfy 0 <= overlap < size, got {self.overlap}"
            )

    @property
    def cap(self) -> int:
        return self.max_size if self.max_size is not None else self.size


@dataclass
class Chunk:
    doc_id: str
    chunk_id: str
    text: str
    char_start: int
    char_end: int
    strategy: Strategy


# Default section-heading patterns: markdown headings, procedure steps,
# numbered items -- matched at the start of a line.
DEFAULT_HEADING_PATTERNS = (r"#{1,6}\s", r"Step\s+\d", r"\d+\.\s")

DEFAULT_TOPIC_CLUSTERS = 5

_TOPIC_JOIN_THRESHOLD = 0.2


def _build(
    text: str, spans: list[tuple[int, int]], strategy: Strategy, doc_id: str
) -> list[Chunk]:
    return [
        Chunk(
            doc_id=doc_id,
            chunk_id=f"{doc_id}:{i:04d}",
            text=text[start:end],
            char_start=start,
            char_end=end,
            strategy=strategy,
        )
        for i, (start, end) in enumerate(spans)
    ]


def _fixed_spans(length: int, params: ChunkParams) -> list[tuple[int, int]]:
    """Sliding-window spans: starts at multiples of (size - overlap).

    A window is emitted only if it extends past the previous emitted end,
    which suppresses fully-contained tail windows.
    """
    step = params.size - params.overlap
    spans: list[tuple[int, int]] = []
    prev_end = 0
    start = 0
    while start < length:
        end = min(start + params.size, length)
        if end > prev_end:
            spans.append((start, end))
            prev_end = end
        start += step
    return spans


def chunk_fixed(text: str, params: ChunkParams, *, doc_id: str = "") -> list[Chunk]:
    return _build(text, _fixed_spans(len(text), params), Strategy.FIXED_WINDOW, doc_id)


def _split_oversized(
    start: int, end: int, params: ChunkParams
) -> list[tuple[int, int]]:
    """One span if it fits the cap, else fixed windows within it."""
    if end - start <= params.cap:
        return [(start, end)]
    return [(start + s, start + e) for s, e in _fixed_spans(end - start, params)]


def chunk_paragraph(text: str, params: ChunkParams, *, doc_id: str = "") -> list[Chunk]:
    """Blank-line paragraphs, greedily merged while the merged slice fits
    params.size; a single oversized paragraph falls back to fixed windows."""
    spans: list[tuple[int, int]] = []
    group: tuple[int, int] | None = None
    for start, end in paragraph_spans(text):
        if group is None:
            group = (start, end)
        elif end - group[0] <= params.size:
            group = (group[0], end)
        else:
            spans.extend(_split_oversized(*group, params))
            group = (start, end)
    if group is not None:
        spans.extend(_split_oversized(*group, params))
    return _build(text, spans, Strategy.PARAGRAPH, doc_id)


def chunk_semantic_unit(
    text: str,
    params: ChunkParams,
    heading_patterns: tuple[str, ...] = DEFAULT_HEADING_PATTERNS,
    *,
    doc_id: str = "",
) -> list[Chunk]:
    """One chunk per section, cut at lines matching a heading pattern.

    The heading line belongs to its own section; text before the first
    heading forms a leading section. Oversized sections fall back to fixed
    windows. No headings at all -> the whole document is one section.
    """
    if not heading_patterns:
        raise ChunkingError("heading_patterns must be non-empty")
    if not text:
        return []
    compiled = [re.compile(p) for p in heading_patterns]

    heading_starts: list[int] = []
    pos = 0
    for line in text.splitlines(keepends=True):
        if any(p.match(line) for p in compiled):
            heading_starts.append(pos)
        pos += len(line)

    cut_points = heading_starts if heading_starts and heading_starts[0] == 0 else [0] + heading_starts
    bounds = cut_points + [len(text)]

    spans: list[tuple[int, int]] = []
    for start, end in zip(bounds, bounds[1:]):
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            spans.extend(_split_oversized(start, end, params))
    return _build(text, spans, Strategy.SEMANTIC_UNIT, doc_id)


def _counter_cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(weight * b[token] for token, weight in a.items())
    if dot == 0:
        return 0.0
    norm_a = sqrt(sum(w * w for w in a.values()))
    norm_b = sqrt(sum(w * w for w in b.values()))
    return dot / (norm_a * norm_b)


def chunk_topic(
    text: str,
    params: ChunkParams,
    k: int = DEFAULT_TOPIC_CLUSTERS,
    *,
    doc_id: str = "",
) -> list[Chunk]:
    """Greedy term-frequency clustering of paragraphs into at most k chunks.

    Each paragraph joins the most-similar existing cluster when cosine
    similarity is at least 0.2, else opens a new one; clusters are then
    merged pairwise (most similar first) until at most k remain. Paragraphs
    inside a cluster are concatenated in document order.
    """
    if k < 1:
        raise ChunkingError(f"cluster count must be >= 1, got {k}")
    paras = paragraph_spans(text)
    if not paras:
        return []

    vectors = [Counter(tokenize(text[s:e])) for s, e in paras]
    clusters: list[list[int]] = []
    sums: list[Counter] = []
    for i, vec in enumerate(vectors):
        best_idx, best_sim = -1, 0.0
        for j, acc in enumerate(sums):
            sim = _counter_cosine(vec, acc)
            if sim > best_sim:
                best_idx, best_sim = j, sim
        if best_idx >= 0 and best_sim >= _TOPIC_JOIN_THRESHOLD:
            clusters[best_idx].append(i)
            sums[best_idx] = sums[best_idx] + vec
        else:
            clusters.append([i])
            sums.append(Counter(vec))

    while len(clusters) > k:
        best_pair, best_sim = (0, 1), -1.0
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                sim = _counter_cosine(sums[a], sums[b])
                if sim > best_sim:
                    best_pair, best_sim = (a, b), sim
        a, b = best_pair
        clusters[a] = sorted(clusters[a] + clusters[b])
        sums[a] = sums[a] + sums[b]
        del clusters[b], sums[b]

    clusters.sort(key=lambda members: members[0])
    chunks = []
    for i, members in enumerate(clusters):
        body = "\n\n".join(text[paras[m][0] : paras[m][1]] for m in members)
        chunks.append(
            Chunk(
                doc_id=doc_id,
                chunk_id=f"{doc_id}:{i:04d}",
                text=body,
                char_start=paras[members[0]][0],
                char_end=paras[members[-1]][1],
                strategy=Strategy.TOPIC,
            )
        )
    return chunks


def _merge_intervals(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[tuple[int, int]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def chunk_entity(
    text: str,
    params: ChunkParams,
    entity_lexicon: list[str],
    *,
    doc_id: str = "",
) -> list[Chunk]:
    """Sentence-aligned windows of params.size centred on lexicon matches.

    Overlapping windows for the same entity merge into one chunk; windows of
    distinct entities may overlap. Text not covered by any window falls into
    residual fixed-window chunks, so every document offset stays reachable.
    """
    if not entity_lexicon:
        raise ChunkingError("entity lexicon must be non-empty")
    if not text:
        return []

    sentences = sentence_spans(text)
    half = params.size // 2

    entity_spans: set[tuple[int, int]] = set()
    for term in entity_lexicon:
        pattern = re.compile(r"\b" + re.escape(term) + r"\b", re.IGNORECASE)
        windows = [
            (max(0, m.start() - half), min(len(text), m.start() + half))
            for m in pattern.finditer(text)
        ]
        for w_start, w_end in _merge_intervals(windows):
            # Expand to the full sentences intersecting the window.
            first = last = None
            for i, (s_start, s_end) in enumerate(sentences):
                if s_end > w_start and s_start < w_end:
                    if first is None:
                        first = i
                    last = i
            if first is None:
                continue
            entity_spans.add((sentences[first][0], sentences[last][1]))

    covered = _merge_intervals(list(entity_spans))
    residual: list[tuple[int, int]] = []
    cursor = 0
    for c_start, c_end in covered:
        if c_start > cursor:
            residual.append((cursor, c_start))
        cursor = max(cursor, c_end)
    if cursor < len(text):
        residual.append((cursor, len(text)))

    all_spans = list(entity_spans)
    for g_start, g_end in residual:
        all_spans.extend(
            (g_start + s, g_start + e)
            for s, e in _fixed_spans(g_end - g_start, params)
        )
    all_spans.sort()
    return _build(text, all_spans, Strategy.ENTITY, doc_id)


def chunk_text(
    text: str,
    strategy: Strategy,
    params: ChunkParams,
    *,
    doc_id: str = "",
    heading_patterns: tuple[str, ...] = DEFAULT_HEADING_PATTERNS,
    entity_lexicon: list[str] | None = None,
    topic_k: int = DEFAULT_TOPIC_CLUSTERS,
) -> list[Chunk]:
    """Dispatch to the chunker for `strategy`."""
    if strategy is Strategy.FIXED_WINDOW:
        return chunk_fixed(text, params, doc_id=doc_id)
    if strategy is Strategy.PARAGRAPH:
        return chunk_paragraph(text, params, doc_id=doc_id)
    if strategy is Strategy.SEMANTIC_UNIT:
        return chunk_semantic_unit(text, params, heading_patterns, doc_id=doc_id)
    if strategy is Strategy.TOPIC:
        return chunk_topic(text, params, topic_k, doc_id=doc_id)
    if strategy is Strategy.ENTITY:
        if entity_lexicon is None:
            raise ChunkingError("entity strategy requires a lexicon")
        return chunk_entity(text, params, entity_lexicon, doc_id=doc_id)
    raise ChunkingError(f"unknown strategy {strategy!r}")
