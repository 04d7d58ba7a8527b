"""Canonical chunk store: one JSON object per line, UTF-8, LF endings.

The store is the handoff between ingestion and everything downstream
(indexing, serving, evaluation). Writing is deterministic: the same corpus,
strategy, and params always produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .chunking import Chunk, ChunkParams, Strategy, chunk_text
from .corpus import Document


class ChunkStoreError(Exception):
    pass


@dataclass
class IngestSummary:
    doc_count: int
    chunk_count: int
    store_path: str


def chunk_document(
    doc: Document,
    strategy: Strategy,
    params: ChunkParams,
    **strategy_options,
) -> list[Chunk]:
    return chunk_text(
        doc.text, strategy, params, doc_id=doc.doc_id, **strategy_options
    )


def write_chunk_store(chunks: list[Chunk], path: str | Path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for chunk in chunks:
                record = {
                    "doc_id": chunk.doc_id,
                    "chunk_id": chunk.chunk_id,
                    "text": chunk.text,
                    "char_start": chunk.char_start,
                    "char_end": chunk.char_end,
                    "strategy": chunk.strategy.value,
                }
                fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
    except OSError as exc:
        raise ChunkStoreError(f"cannot write chunk store {path}: {exc}") from exc


def read_chunk_store(path: str | Path) -> list[Chunk]:
    path = Path(path)
    if not path.is_file():
        raise ChunkStoreError(f"chunk store not found: {path}")
    chunks = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                chunks.append(
                    Chunk(
                        doc_id=rec["doc_id"],
                        chunk_id=rec["chunk_id"],
                        text=rec["text"],
                        char_start=rec["char_start"],
                        char_end=rec["char_end"],
                        strategy=Strategy(rec["strategy"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ChunkStoreError(f"{path}:{lineno}: bad record: {exc}") from exc
    return chunks


def ingest(
    corpus: list[Document],
    strategy: Strategy,
    params: ChunkParams,
    store_path: str | Path,
    **strategy_options,
) -> IngestSummary:
    """Chunk every document and persist the result in (doc, ordinal) order."""
    if not corpus:
        raise ChunkStoreError("cannot ingest an empty corpus")
    chunks: list[Chunk] = []
    for doc in corpus:
        chunks.extend(chunk_document(doc, strategy, params, **strategy_options))
    write_chunk_store(chunks, store_path)
    return IngestSummary(
        doc_count=len(corpus), chunk_count=len(chunks), store_path=str(store_path)
    )
