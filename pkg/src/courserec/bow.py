"""Bag-of-words course vectors over preprocessed catalog descriptions.

Three weighting schemes: raw term frequency, binary presence, and tf-idf
with idf(t) = ln(n_documents / df(t)), natural log, no smoothing.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import IO, Literal, Sequence

import numpy as np

from .errors import DataError
from .vectorspace import DenseEmbeddingSet

__all__ = [
    "TermIndex",
    "SparseVector",
    "Scheme",
    "build_term_index",
    "vectorize",
    "vectorize_catalog",
    "sparse_cosine",
    "to_embedding_set",
    "write_sparse_csv",
]

Scheme = Literal["tf", "binary", "tfidf"]
SCHEMES = ("tf", "binary", "tfidf")


@dataclass(frozen=True)
class TermIndex:
    """Column assignment and document frequencies for an indexed vocabulary."""

    columns: dict[str, int]
    document_frequency: dict[str, int]
    n_documents: int

    @property
    def dimension(self) -> int:
        return len(self.columns)

    def idf(self, term: str) -> float:
        return math.log(self.n_documents / self.document_frequency[term])


@dataclass(frozen=True)
class SparseVector:
    dimension: int
    entries: tuple[tuple[int, float], ...]  # (column, weight), columns ascending

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        for col, w in self.entries:
            out[col] = w
        return out


def build_term_index(documents: Sequence[Sequence[str]]) -> TermIndex:
    """Index every token appearing in at least one document.

    Columns are assigned contiguously in sorted term order; df counts distinct
    documents containing the term.
    """
    if not documents:
        raise DataError("cannot build a term index from an empty corpus")
    df: Counter = Counter()
    for doc in documents:
        df.update(set(doc))
    columns = {term: i for i, term in enumerate(sorted(df))}
    return TermIndex(columns=columns, document_frequency=dict(df), n_documents=len(documents))


def vectorize(document: Sequence[str], index: TermIndex, scheme: Scheme) -> SparseVector:
    """Weight a tokenized document against the index.

    Out-of-vocabulary tokens are ignored; zero weights (tf-idf of a term
    present in every document) never appear in the entries.
    """
    if scheme not in SCHEMES:
        raise DataError(f"unknown weighting scheme {scheme!r}")
    counts = Counter(t for t in document if t in index.columns)
    entries = []
    for term, tf in counts.items():
        if scheme == "tf":
            weight = float(tf)
        elif scheme == "binary":
            weight = 1.0
        else:
            weight = tf * index.idf(term)
        if weight != 0.0:
            entries.append((index.columns[term], weight))
    entries.sort()
    return SparseVector(dimension=index.dimension, entries=tuple(entries))


def sparse_cosine(u: SparseVector, v: SparseVector) -> float:
    """Cosine over sparse entries; raises on zero vectors like the dense path."""
    from .errors import ZeroVectorError

    if u.is_zero() or v.is_zero():
        raise ZeroVectorError("cosine undefined for zero vector")
    vu = dict(u.entries)
    dot = sum(w * vu.get(col, 0.0) for col, w in v.entries)
    nu = math.sqrt(sum(w * w for _, w in u.entries))
    nv = math.sqrt(sum(w * w for _, w in v.entries))
    return max(-1.0, min(1.0, dot / (nu * nv)))


def to_embedding_set(
    course_ids: Sequence[str], vectors: Sequence[SparseVector], provenance: str
) -> DenseEmbeddingSet:
    """Densify sparse vectors into an embedding set (row order = course order)."""
    if len(course_ids) != len(vectors):
        raise DataError("course ids and vectors must align")
    if not vectors:
        raise DataError("cannot densify an empty vector collection")
    dim = vectors[0].dimension
    matrix = np.zeros((len(vectors), dim))
    for i, vec in enumerate(vectors):
        if vec.dimension != dim:
            raise DataError("inconsistent sparse vector dimensions")
        for col, w in vec.entries:
            matrix[i, col] = w
    return DenseEmbeddingSet(courses=list(course_ids), matrix=matrix, provenance=provenance)


def write_sparse_csv(
    course_ids: Sequence[str], vectors: Sequence[SparseVector], stream: IO[str]
) -> None:
    stream.write("course_id,column,weight\n")
    for cid, vec in zip(course_ids, vectors):
        for col, w in vec.entries:
            stream.write(f"{cid},{col},{w:.9g}\n")


def vectorize_catalog(
    catalog,
    scheme: Scheme,
    boilerplate: Sequence[str] = (),
    stopwords: Sequence[str] = (),
) -> tuple[list[str], list[SparseVector], TermIndex]:
    """Preprocess every catalog description and vectorize under one index.

    Returns (course ids in sorted order, their vectors, the shared index).
    Courses whose descriptions reduce to nothing get zero vectors.
    """
    from .textprep import preprocess_description

    course_ids = sorted(catalog)
    if not course_ids:
        raise DataError("catalog contains no courses")
    documents = [
        preprocess_description(catalog[cid].description, boilerplate, stopwords)
        for cid in course_ids
    ]
    index = build_term_index(documents)
    vectors = [vectorize(doc, index, scheme) for doc in documents]
    return course_ids, vectors, index
