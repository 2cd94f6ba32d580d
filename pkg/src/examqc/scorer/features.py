"""Hashed n-gram featurizer standing in for transformer embeddings.

Text is lowercased and split on unicode whitespace.  Three token families
feed one shared hash space of D = 2^18 buckets:

    w:<token>            word unigrams
    b:<tok1> <tok2>      word bigrams
    c:<3 chars>          character trigrams of the whitespace-collapsed text

The hash is 64-bit FNV-1a over the UTF-8 bytes of the prefixed string,
taken mod D.  Counts are L2-normalized, so every nonempty text has unit
norm and duplicated text length does not inflate margins.
"""
from __future__ import annotations

D = 1 << 18

_FNV_OFFSET = 0xcbf29ce484222325
_FNV_PRIME = 0x100000001b3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def bucket(ngram: str) -> int:
    return fnv1a64(ngram.encode("utf-8")) % D


def featurize(text: str) -> dict[int, float]:
    """Sparse L2-normalized feature vector; {} for empty-after-trim text."""
    toks = text.lower().split()
    if not toks:
        return {}
    counts: dict[int, float] = {}

    def add(ngram: str) -> None:
        k = bucket(ngram)
        counts[k] = counts.get(k, 0.0) + 1.0

    for t in toks:
        add("w:" + t)
    for a, b in zip(toks, toks[1:]):
        add(f"b:{a} {b}")
    collapsed = " ".join(toks)
    for k in range(len(collapsed) - 2):
        add("c:" + collapsed[k:k + 3])

    norm = sum(v * v for v in counts.values()) ** 0.5
    return {k: v / norm for k, v in sorted(counts.items())}


def cosine(a: dict[int, float], b: dict[int, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(v * b.get(k, 0.0) for k, v in a.items())
