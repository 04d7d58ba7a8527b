"""Exact top-k cosine retrieval over embedded chunks.

The corpus is a few thousand chunks at most, so the index is a plain matrix
scan: exact, oracle-testable, and read-safe from any number of threads once
built. Persistence stores only chunk ids and vectors; chunk text is resolved
from the chunk store on load rather than duplicated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chunking import Chunk
from .embedding import Embedder, EmptyTextError

_NORM_TOLERANCE = 1e-9


class VectorIndexError(Exception):
    pass


@dataclass
class ScoredChunk:
    chunk: Chunk
    score: float


class VectorIndex:
    def __init__(self, embedder: Embedder):
        self.embedder = embedder
        self._chunks: list[Chunk] = []
        self._ids: list[str] = []
        self._matrix = np.zeros((0, embedder.dimension), dtype=np.float64)

    def __len__(self) -> int:
        return len(self._chunks)

    @property
    def dimension(self) -> int:
        return self.embedder.dimension

    @classmethod
    def build(cls, chunks: list[Chunk], embedder: Embedder) -> "VectorIndex":
        """Embed and store every chunk.

        Chunks whose text has no tokens get the designated zero vector (they
        can never be retrieved); any other embedder failure aborts the build,
        naming the offending chunk.
        """
        if not chunks:
            raise VectorIndexError("cannot build an index from zero chunks")
        seen: set[str] = set()
        for chunk in chunks:
            if chunk.chunk_id in seen:
                raise VectorIndexError(f"duplicate chunk_id {chunk.chunk_id!r}")
            seen.add(chunk.chunk_id)

        index = cls(embedder)
        rows = []
        for chunk in chunks:
            try:
                rows.append(embedder.embed(chunk.text))
            except EmptyTextError:
                rows.append(np.zeros(embedder.dimension, dtype=np.float64))
            except Exception as exc:
                raise VectorIndexError(
                    f"embedder failed on chunk {chunk.chunk_id!r}: {exc}"
                ) from exc
        index._chunks = list(chunks)
        index._ids = [c.chunk_id for c in chunks]
        index._matrix = np.vstack(rows)
        return index

    def search(self, query_vector: np.ndarray, k: int) -> list[ScoredChunk]:
        """Exact top-k by cosine; ties broken by chunk_id ascending."""
        if k < 1:
            raise VectorIndexError(f"k must be >= 1, got {k}")
        if query_vector.shape != (self.dimension,):
            raise VectorIndexError(
                f"query dimension {query_vector.shape} != index dimension {self.dimension}"
            )
        if not self._chunks:
            return []
        norm = np.linalg.norm(query_vector)
        query = query_vector / norm if norm > 0 else query_vector
        scores = self._matrix @ query
        order = sorted(range(len(self._chunks)), key=lambda i: (-scores[i], self._ids[i]))
        return [
            ScoredChunk(chunk=self._chunks[i], score=float(scores[i]))
            for i in order[:k]
        ]

    def search_text(self, query: str, k: int) -> list[ScoredChunk]:
        return self.search(self.embedder.embed(query), k)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            header = {
                "dimension": self.dimension,
                "count": len(self._chunks),
                "embedder": self.embedder.name,
            }
            fh.write(json.dumps(header, separators=(",", ":")))
            fh.write("\n")
            for chunk_id, row in zip(self._ids, self._matrix):
                rec = {"chunk_id": chunk_id, "vector": row.tolist()}
                fh.write(json.dumps(rec, separators=(",", ":")))
                fh.write("\n")

    @classmethod
    def load(
        cls, path: str | Path, chunks: list[Chunk], embedder: Embedder
    ) -> "VectorIndex":
        """Rehydrate a saved index, resolving chunk text from `chunks`."""
        path = Path(path)
        by_id = {c.chunk_id: c for c in chunks}
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("dimension") != embedder.dimension:
                raise VectorIndexError(
                    f"index dimension {header.get('dimension')} != embedder "
                    f"dimension {embedder.dimension}"
                )
            if header.get("embedder") != embedder.name:
                raise VectorIndexError(
                    f"index was built with embedder {header.get('embedder')!r}, "
                    f"not {embedder.name!r}"
                )
            index = cls(embedder)
            rows = []
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                chunk = by_id.get(rec["chunk_id"])
                if chunk is None:
                    raise VectorIndexError(
                        f"chunk {rec['chunk_id']!r} not present in chunk store"
                    )
                index._chunks.append(chunk)
                index._ids.append(rec["chunk_id"])
                rows.append(np.asarray(rec["vector"], dtype=np.float64))
        if len(rows) != header.get("count"):
            raise VectorIndexError(
                f"index declares {header.get('count')} rows, found {len(rows)}"
            )
        if rows:
            index._matrix = np.vstack(rows)
        return index

    def vector_norms(self) -> np.ndarray:
        return np.linalg.norm(self._matrix, axis=1)
