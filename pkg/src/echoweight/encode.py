"""Deterministic text vectorization: hashed bag-of-words with TF-IDF.

Token buckets come from 64-bit FNV-1a over UTF-8 bytes, mod the vector
dimension, so vectors are bitwise reproducible across runs and platforms.
The IDF table is fit on the training split only; tokens hashing to a
bucket unseen in training are dropped at encode time.
"""

from __future__ import annotations

import json
import math
import re
import string
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)

DEFAULT_DIM = 4096


def fnv1a64(token: str) -> int:
    """64-bit FNV-1a hash of the token's UTF-8 bytes."""
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def preprocess(raw_text: str) -> list[str]:
    """Lowercase and tokenize, stripping URLs, hashtags, mentions, and
    punctuation. Punctuation-only tokens vanish; an empty result is fine."""
    tokens = []
    for tok in _URL_RE.sub(" ", raw_text.lower()).split():
        if tok.startswith("#") or tok.startswith("@"):
            continue
        tok = tok.translate(_PUNCT_TABLE)
        if tok:
            tokens.append(tok)
    return tokens


@dataclass(frozen=True)
class IdfTable:
    """Bucket -> inverse document frequency, fit on the training split."""

    dim: int
    idf: dict[int, float]

    @classmethod
    def fit(cls, documents: Iterable[Sequence[str]], dim: int = DEFAULT_DIM) -> "IdfTable":
        """Smoothed IDF per bucket: ln((1 + N) / (1 + df)) + 1."""
        df: Counter[int] = Counter()
        n_docs = 0
        for tokens in documents:
            n_docs += 1
            for bucket in {fnv1a64(t) % dim for t in tokens}:
                df[bucket] += 1
        idf = {b: math.log((1 + n_docs) / (1 + d)) + 1.0 for b, d in df.items()}
        return cls(dim=dim, idf=idf)

    def to_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {"dim": self.dim, "hash": "fnv1a64",
                 "idf": {str(b): v for b, v in sorted(self.idf.items())}},
                fh,
            )

    @classmethod
    def from_json(cls, path: str | Path) -> "IdfTable":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(dim=obj["dim"], idf={int(b): v for b, v in obj["idf"].items()})


def encode_news(tokens: Sequence[str], idf: IdfTable) -> np.ndarray:
    """TF-IDF vector over hashed buckets, unit L2 norm (zero if empty)."""
    vec = np.zeros(idf.dim)
    for bucket, tf in Counter(fnv1a64(t) % idf.dim for t in tokens).items():
        weight = idf.idf.get(bucket)
        if weight is not None:  # bucket unseen in training: out-of-vocabulary
            vec[bucket] = tf * weight
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def encode_comments(comments: Sequence[Sequence[str]], idf: IdfTable) -> np.ndarray:
    """Mean of per-comment vectors, re-normalized to unit L2."""
    if not comments:
        return np.zeros(idf.dim)
    mean = np.mean([encode_news(tokens, idf) for tokens in comments], axis=0)
    norm = np.linalg.norm(mean)
    return mean / norm if norm > 0 else mean
