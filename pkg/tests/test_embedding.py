import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyrag.embedding import (
    EmptyTextError,
    HashedBagOfWordsEmbedder,
    fnv1a_64,
)


def fnv1a_64_oracle(data: bytes) -> int:
    """Independent FNV-1a reimplementation for cross-checking."""
    h = 14695981039346656037
    for byte in data:
        h = ((h ^ byte) * 1099511628211) % (1 << 64)
    return h


def test_fnv1a_reference_values():
    # Published FNV-1a 64-bit test vectors.
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64(b"foobar") == 0x85944171F73967E8


@given(st.binary(max_size=64))
def test_fnv1a_matches_oracle(data):
    assert fnv1a_64(data) == fnv1a_64_oracle(data)


def test_single_token_type_gives_unit_bucket():
    emb = HashedBagOfWordsEmbedder()
    vec = emb.embed("hello hello")
    nonzero = np.nonzero(vec)[0]
    assert len(nonzero) == 1
    assert vec[nonzero[0]] == pytest.approx(1.0)


def test_embed_deterministic():
    emb = HashedBagOfWordsEmbedder()
    text = "the leave policy grants twenty days"
    assert np.array_equal(emb.embed(text), emb.embed(text))


def test_embed_zero_tokens_errors():
    emb = HashedBagOfWordsEmbedder()
    with pytest.raises(EmptyTextError):
        emb.embed("!!! ...")


def test_disjoint_token_sets_give_zero_cosine():
    # Brute-force scan for a word pair whose buckets do not collide, then
    # assert the embeddings are exactly orthogonal.
    emb = HashedBagOfWordsEmbedder()
    words = [f"word{i}" for i in range(200)]
    pair = None
    for a in words:
        for b in words:
            if a != b and emb.bucket(a) != emb.bucket(b):
                pair = (a, b)
                break
        if pair:
            break
    assert pair is not None
    va, vb = emb.embed(pair[0]), emb.embed(pair[1])
    assert float(va @ vb) == 0.0


def test_vectors_are_normalized():
    emb = HashedBagOfWordsEmbedder()
    for text in ("one", "one two three", "a a a b b c"):
        assert np.linalg.norm(emb.embed(text)) == pytest.approx(1.0, abs=1e-9)
