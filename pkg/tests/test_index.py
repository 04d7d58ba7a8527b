import random

import numpy as np
import pytest

from polyrag.chunking import Chunk, Strategy
from polyrag.embedding import HashedBagOfWordsEmbedder
from polyrag.index import ScoredChunk, VectorIndex, VectorIndexError


def make_chunks(texts: list[str], doc_id: str = "d") -> list[Chunk]:
    return [
        Chunk(
            doc_id=doc_id,
            chunk_id=f"{doc_id}:{i:04d}",
            text=text,
            char_start=0,
            char_end=len(text),
            strategy=Strategy.FIXED_WINDOW,
        )
        for i, text in enumerate(texts)
    ]


def brute_force_search(
    index_chunks: list[Chunk], embedder, query_vec: np.ndarray, k: int
) -> list[tuple[str, float]]:
    """Oracle: per-chunk cosine with an explicit loop, full sort."""
    norm = float(np.linalg.norm(query_vec))
    q = query_vec / norm if norm > 0 else query_vec
    scored = []
    for chunk in index_chunks:
        try:
            vec = embedder.embed(chunk.text)
        except Exception:
            vec = np.zeros(embedder.dimension)
        scored.append((chunk.chunk_id, float(np.dot(vec, q))))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]


def test_build_and_size():
    chunks = make_chunks(["alpha one", "beta two", "gamma three"])
    index = VectorIndex.build(chunks, HashedBagOfWordsEmbedder())
    assert len(index) == 3


def test_duplicate_chunk_id_rejected():
    chunks = make_chunks(["a", "b"])
    chunks[1].chunk_id = chunks[0].chunk_id
    with pytest.raises(VectorIndexError):
        VectorIndex.build(chunks, HashedBagOfWordsEmbedder())


def test_self_query_scores_one():
    chunks = make_chunks(["alpha one", "beta two", "gamma three"])
    embedder = HashedBagOfWordsEmbedder()
    index = VectorIndex.build(chunks, embedder)
    results = index.search(embedder.embed("beta two"), 1)
    assert results[0].chunk.chunk_id == "d:0001"
    assert results[0].score == pytest.approx(1.0, abs=1e-9)


def test_k_larger_than_index_returns_all():
    chunks = make_chunks(["alpha", "beta"])
    index = VectorIndex.build(chunks, HashedBagOfWordsEmbedder())
    assert len(index.search_text("alpha", 10)) == 2


def test_tie_break_by_chunk_id():
    chunks = make_chunks(["same text", "same text again no", "same text"])
    chunks[2].chunk_id = "d:9999"
    embedder = HashedBagOfWordsEmbedder()
    index = VectorIndex.build(chunks, embedder)
    results = index.search(embedder.embed("same text"), 2)
    assert [r.chunk.chunk_id for r in results] == ["d:0000", "d:9999"]


def test_zero_token_chunk_gets_zero_vector_and_never_ranks():
    chunks = make_chunks(["real words here", "...", "more real words"])
    index = VectorIndex.build(chunks, HashedBagOfWordsEmbedder())
    norms = index.vector_norms()
    assert norms[1] == 0.0
    results = index.search_text("real words", 3)
    assert results[-1].chunk.chunk_id == "d:0001"
    assert results[-1].score == 0.0


def test_search_matches_brute_force_on_random_corpora():
    rng = random.Random(41)
    embedder = HashedBagOfWordsEmbedder()
    vocab = [f"w{i}" for i in range(800)]
    for trial in range(20):
        n = rng.randint(1, 120)
        chunks = make_chunks(
            [" ".join(rng.choices(vocab, k=rng.randint(3, 20))) for _ in range(n)],
            doc_id=f"t{trial}",
        )
        index = VectorIndex.build(chunks, embedder)
        for _ in range(5):
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 8)))
            qvec = embedder.embed(query)
            got = [(r.chunk.chunk_id, r.score) for r in index.search(qvec, 4)]
            want = brute_force_search(chunks, embedder, qvec, 4)
            assert [g[0] for g in got] == [w[0] for w in want]
            for (_, gs), (_, ws) in zip(got, want):
                assert gs == pytest.approx(ws, abs=1e-9)


def test_persistence_roundtrip_identical_results(tmp_path):
    embedder = HashedBagOfWordsEmbedder()
    chunks = make_chunks(["alpha beta", "gamma delta", "epsilon zeta eta"])
    index = VectorIndex.build(chunks, embedder)
    path = tmp_path / "index.jsonl"
    index.save(path)

    loaded = VectorIndex.load(path, chunks, embedder)
    for query in ("alpha", "gamma delta", "zeta"):
        a = [(r.chunk.chunk_id, r.score) for r in index.search_text(query, 3)]
        b = [(r.chunk.chunk_id, r.score) for r in loaded.search_text(query, 3)]
        assert a == b


def test_persistence_header_and_missing_chunk(tmp_path):
    embedder = HashedBagOfWordsEmbedder()
    chunks = make_chunks(["alpha beta", "gamma delta"])
    index = VectorIndex.build(chunks, embedder)
    path = tmp_path / "index.jsonl"
    index.save(path)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert '"dimension":256' in header
    assert '"embedder":"hash-bow-v1"' in header
    with pytest.raises(VectorIndexError):
        VectorIndex.load(path, chunks[:1], embedder)


def test_search_validates_inputs():
    index = VectorIndex.build(make_chunks(["a b"]), HashedBagOfWordsEmbedder())
    with pytest.raises(VectorIndexError):
        index.search(np.zeros(3), 1)
    with pytest.raises(VectorIndexError):
        index.search(np.zeros(256), 0)


def test_scored_chunk_scores_within_bounds():
    embedder = HashedBagOfWordsEmbedder()
    chunks = make_chunks(["alpha beta gamma", "delta alpha", "unrelated words"])
    index = VectorIndex.build(chunks, embedder)
    results = index.search_text("alpha beta", 3)
    assert all(isinstance(r, ScoredChunk) for r in results)
    assert all(-1.0 - 1e-9 <= r.score <= 1.0 + 1e-9 for r in results)
