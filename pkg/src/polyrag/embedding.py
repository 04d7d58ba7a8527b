"""Text embedding behind a provider interface.

The default embedder is a deterministic hashed bag-of-words: each token is
FNV-1a hashed into one of 256 buckets and the bucket-count vector is
L2-normalized. No model weights, no network, identical output on every run;
real embedding providers plug in behind the same two attributes.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .text import tokenize

DEFAULT_DIMENSION = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


class EmbeddingError(Exception):
    pass


class EmptyTextError(EmbeddingError):
    """Text had no alphanumeric tokens, so there is nothing to embed."""


class Embedder(Protocol):
    name: str
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def fnv1a_64(data: bytes) -> int:
    value = _FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & _MASK64
    return value


class HashedBagOfWordsEmbedder:
    """Deterministic offline embedder: FNV-1a token buckets, L2-normalized."""

    name = "hash-bow-v1"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension

    def bucket(self, token: str) -> int:
        return fnv1a_64(token.encode("utf-8")) % self.dimension

    def embed(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyTextError("no alphanumeric tokens to embed")
        vector = np.zeros(self.dimension, dtype=np.float64)
        for token in tokens:
            vector[self.bucket(token)] += 1.0
        return vector / np.linalg.norm(vector)
