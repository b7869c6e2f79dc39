"""Scores pairs by cosine similarity of sentence embeddings.

The model name is a command argument. The special name "hash" selects a
dependency-free bag-of-words embedding (deterministic feature hashing),
which keeps protocol conformance testable offline; any other name is
loaded as a sentence-transformers checkpoint, e.g. a negation-aware
model published on a model hub.
"""

from __future__ import annotations

import argparse
import hashlib
import math
from functools import lru_cache
from typing import Callable

from .protocol import serve

HASH_DIMENSIONS = 256


def hash_embed(text: str) -> list[float]:
    vector = [0.0] * HASH_DIMENSIONS
    for word in text.lower().split():
        digest = hashlib.sha256(word.encode("utf-8")).digest()
        index = int.from_bytes(digest[:4], "big") % HASH_DIMENSIONS
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vector[index] += sign
    return vector


def cosine(a: list[float], b: list[float]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    norm_a = math.sqrt(sum(x * x for x in a))
    norm_b = math.sqrt(sum(y * y for y in b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def build_embedder(model: str) -> Callable[[str], list[float]]:
    if model == "hash":
        return hash_embed
    from sentence_transformers import SentenceTransformer

    transformer = SentenceTransformer(model)

    def embed(text: str) -> list[float]:
        return transformer.encode([text], show_progress_bar=False)[0].tolist()

    return embed


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("model", nargs="?", default="hash",
                        help='embedding model name, or "hash" for the '
                             "offline bag-of-words backend")
    args = parser.parse_args()
    embed = lru_cache(maxsize=4096)(build_embedder(args.model))
    return serve(lambda reference, candidate: cosine(embed(reference),
                                                     embed(candidate)))


if __name__ == "__main__":
    raise SystemExit(main())
