"""Okapi BM25 index over training snippets for few-shot example retrieval."""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass


@dataclass(frozen=True)
class Bm25Params:
    """Okapi weighting parameters plus the floor applied to non-positive IDFs."""

    k1: float = 1.5
    b: float = 0.75
    idf_floor_epsilon: float = 0.25

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")
        if self.idf_floor_epsilon < 0:
            raise ValueError(f"idf_floor_epsilon must be >= 0, got {self.idf_floor_epsilon}")


@dataclass(frozen=True)
class RetrievalConfig:
    """Number of examples to retrieve per query."""

    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercase, split on Unicode whitespace, strip edge punctuation.

    Adequate for whitespace-delimited scripts; unsegmented scripts (e.g.
    Chinese) collapse to near-whole-sentence tokens and retrieval quality
    degrades accordingly.
    """
    tokens = (_strip_punctuation(part) for part in text.lower().split())
    return [t for t in tokens if t]


@dataclass
class Bm25Index:
    """Immutable term statistics for a fixed document collection."""

    params: Bm25Params
    doc_ids: tuple[str, ...]
    doc_count: int
    doc_lengths: tuple[int, ...]
    avgdl: float
    term_frequencies: tuple[dict[str, int], ...]
    document_frequency: dict[str, int]
    idf: dict[str, float]

    def __post_init__(self):
        self._positions = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}

    def position(self, doc_id: str) -> int:
        return self._positions[doc_id]  # KeyError for unknown ids

    def describe(self) -> str:
        """Plain-text statistics dump for debugging."""
        lines = [
            f"documents: {self.doc_count}",
            f"avgdl: {self.avgdl:.4f}",
            f"vocabulary: {len(self.idf)}",
            f"k1={self.params.k1} b={self.params.b} epsilon={self.params.idf_floor_epsilon}",
        ]
        for term in sorted(self.idf):
            lines.append(f"  {term}\tdf={self.document_frequency[term]}\tidf={self.idf[term]:.6f}")
        return "\n".join(lines)


def build_index(corpus: list[tuple[str, str]], params: Bm25Params = Bm25Params()) -> Bm25Index:
    """Index ``(doc_id, text)`` pairs.

    Raw IDF is ``ln((N - n + 0.5) / (n + 0.5))``; any non-positive value is
    replaced by ``epsilon * mean(positive IDFs)`` so every term contributes a
    non-negative score. With no positive IDFs at all the floor is 0.
    """
    if not corpus:
        raise ValueError("cannot build an index over an empty corpus")
    doc_ids = tuple(doc_id for doc_id, _ in corpus)
    if len(set(doc_ids)) != len(doc_ids):
        raise ValueError("duplicate document ids in corpus")

    term_frequencies = tuple(Counter(tokenize(text)) for _, text in corpus)
    doc_lengths = tuple(sum(tf.values()) for tf in term_frequencies)
    doc_count = len(corpus)
    avgdl = sum(doc_lengths) / doc_count

    document_frequency: Counter[str] = Counter()
    for tf in term_frequencies:
        document_frequency.update(tf.keys())

    raw_idf = {
        term: math.log((doc_count - n + 0.5) / (n + 0.5))
        for term, n in document_frequency.items()
    }
    positive = [v for v in raw_idf.values() if v > 0]
    floor = params.idf_floor_epsilon * (sum(positive) / len(positive)) if positive else 0.0
    idf = {term: (v if v > 0 else floor) for term, v in raw_idf.items()}

    return Bm25Index(
        params=params,
        doc_ids=doc_ids,
        doc_count=doc_count,
        doc_lengths=doc_lengths,
        avgdl=avgdl,
        term_frequencies=term_frequencies,
        document_frequency=dict(document_frequency),
        idf=idf,
    )


def score(index: Bm25Index, query: str, doc_id: str) -> float:
    """Okapi BM25 score of one document against a query.

    Additive over query tokens (a repeated token counts twice); tokens
    absent from the document or the vocabulary contribute 0.
    """
    position = index.position(doc_id)
    tf = index.term_frequencies[position]
    params = index.params
    norm = params.k1 * (1.0 - params.b + params.b * index.doc_lengths[position] / index.avgdl)
    total = 0.0
    for token in tokenize(query):
        freq = tf.get(token)
        if not freq:
            continue
        total += index.idf[token] * freq * (params.k1 + 1.0) / (freq + norm)
    return total


def top_k(index: Bm25Index, query: str, config: RetrievalConfig) -> list[tuple[str, float]]:
    """The k best-scoring documents, descending; ties break by corpus position."""
    if config.k > index.doc_count:
        raise ValueError(f"k={config.k} exceeds indexed document count {index.doc_count}")
    scored = [(doc_id, score(index, query, doc_id)) for doc_id in index.doc_ids]
    order = sorted(range(index.doc_count), key=lambda i: (-scored[i][1], i))
    return [scored[i] for i in order[: config.k]]
