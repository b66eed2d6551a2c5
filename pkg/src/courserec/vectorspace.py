"""Dense course-vector algebra: cosine ranking, analogies, normalization,
concatenation, and the text interchange format.

All query arithmetic runs in 64-bit floats regardless of how vectors were
stored, to keep rank comparisons stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import DataError, EmbeddingFormatError, UnknownCourseError, ZeroVectorError

__all__ = [
    "DenseEmbeddingSet",
    "RankedEntry",
    "RankedList",
    "DropReport",
    "cosine",
    "rank_by_cosine",
    "nearest_neighbors",
    "analogy_query",
    "l2_normalize",
    "concat_sets",
    "write_embeddings",
    "save_embeddings",
    "read_embeddings",
    "load_embeddings",
]


@dataclass
class DenseEmbeddingSet:
    """A course-aligned embedding matrix with a provenance label."""

    courses: list[str]
    matrix: np.ndarray
    provenance: str = ""
    _row: dict[str, int] = field(init=False, repr=False)
    _norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.courses):
            raise DataError("embedding matrix must have one row per course")
        if self.matrix.shape[0] and self.matrix.shape[1] < 1:
            raise DataError("embedding dimension must be >= 1")
        if not np.all(np.isfinite(self.matrix)):
            raise DataError("embedding matrix contains non-finite values")
        if len(set(self.courses)) != len(self.courses):
            raise DataError("duplicate course ids in embedding set")
        self._row = {cid: i for i, cid in enumerate(self.courses)}
        self._norms = np.linalg.norm(self.matrix, axis=1)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.courses)

    def __contains__(self, course_id: str) -> bool:
        return course_id in self._row

    def row(self, course_id: str) -> int:
        try:
            return self._row[course_id]
        except KeyError:
            raise UnknownCourseError(course_id) from None

    def vector(self, course_id: str) -> np.ndarray:
        return self.matrix[self.row(course_id)]

    def is_zero(self, course_id: str) -> bool:
        return self._norms[self.row(course_id)] == 0.0

    def zero_vector_ids(self) -> list[str]:
        return [cid for i, cid in enumerate(self.courses) if self._norms[i] == 0.0]


@dataclass(frozen=True)
class RankedEntry:
    course_id: str
    score: float


@dataclass
class RankedList:
    """Cosine-ranked courses; scores non-increasing, ties by ascending id.

    ``undefined_query`` marks rankings that could not be computed because the
    query vector was zero.
    """

    entries: list[RankedEntry]
    undefined_query: bool = False

    def ids(self) -> list[str]:
        return [e.course_id for e in self.entries]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def rank_by_cosine(
    embeddings: DenseEmbeddingSet,
    target: np.ndarray,
    exclude: Iterable[str] = (),
) -> RankedList:
    """Rank every rankable course by cosine similarity to ``target``.

    Zero-vector courses are excluded (their similarity is undefined); a zero
    target yields an empty list flagged ``undefined_query``.
    """
    target = np.asarray(target, dtype=np.float64)
    tnorm = np.linalg.norm(target)
    if tnorm == 0.0:
        return RankedList(entries=[], undefined_query=True)
    excluded = set(exclude)
    scores = embeddings.matrix @ target
    with np.errstate(invalid="ignore", divide="ignore"):
        scores = scores / (embeddings._norms * tnorm)
    ranked = [
        (cid, float(np.clip(scores[i], -1.0, 1.0)))
        for i, cid in enumerate(embeddings.courses)
        if cid not in excluded and embeddings._norms[i] != 0.0
    ]
    ranked.sort(key=lambda e: (-e[1], e[0]))
    return RankedList(entries=[RankedEntry(cid, s) for cid, s in ranked])


def nearest_neighbors(
    embeddings: DenseEmbeddingSet,
    query: str,
    k: int,
    exclude: Iterable[str] = (),
) -> RankedList:
    """Top-k cosine neighbors of a course, excluding itself and ``exclude``."""
    vec = embeddings.vector(query)
    ranked = rank_by_cosine(embeddings, vec, exclude=set(exclude) | {query})
    ranked.entries = ranked.entries[: max(k, 0)]
    return ranked


def analogy_query(
    embeddings: DenseEmbeddingSet, c1: str, c2: str, c3: str, k: int
) -> RankedList:
    """Vector-offset analogy: rank courses by cosine to v(c2) - v(c1) + v(c3),
    excluding the three probe courses."""
    target = embeddings.vector(c2) - embeddings.vector(c1) + embeddings.vector(c3)
    ranked = rank_by_cosine(embeddings, target, exclude={c1, c2, c3})
    ranked.entries = ranked.entries[: max(k, 0)]
    return ranked


def l2_normalize(embeddings: DenseEmbeddingSet) -> DenseEmbeddingSet:
    """Scale every non-zero row to unit length; zero rows stay zero (query
    them via ``zero_vector_ids``)."""
    norms = np.linalg.norm(embeddings.matrix, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return DenseEmbeddingSet(
        courses=list(embeddings.courses),
        matrix=embeddings.matrix / safe,
        provenance=embeddings.provenance,
    )


@dataclass
class DropReport:
    only_in_a: list[str]
    only_in_b: list[str]

    def lines(self) -> list[str]:
        return [f"dropped (only in A): {cid}" for cid in self.only_in_a] + [
            f"dropped (only in B): {cid}" for cid in self.only_in_b
        ]


def concat_sets(
    a: DenseEmbeddingSet,
    b: DenseEmbeddingSet,
    normalize_parts: bool,
    provenance: str | None = None,
) -> tuple[DenseEmbeddingSet, DropReport]:
    """Concatenate two embedding sets over their common courses.

    With ``normalize_parts`` each half is L2-normalized before concatenation,
    counterbalancing magnitude differences between representations.
    """
    common = [cid for cid in a.courses if cid in b]
    report = DropReport(
        only_in_a=[cid for cid in a.courses if cid not in b],
        only_in_b=[cid for cid in b.courses if cid not in a],
    )
    if not common:
        raise DataError("embedding sets share no courses")
    left, right = (l2_normalize(a), l2_normalize(b)) if normalize_parts else (a, b)
    matrix = np.hstack(
        [
            np.stack([left.vector(cid) for cid in common]),
            np.stack([right.vector(cid) for cid in common]),
        ]
    )
    if provenance is None:
        suffix = " (norm)" if normalize_parts else ""
        provenance = f"{a.provenance}+{b.provenance}{suffix}"
    return DenseEmbeddingSet(courses=common, matrix=matrix, provenance=provenance), report


def write_embeddings(embeddings: DenseEmbeddingSet, stream: IO[str]) -> None:
    """Write the text interchange format: header ``<count> <dim>``, then one
    ``<course_id> <f1> ... <fdim>`` line per course (9 significant digits)."""
    stream.write(f"{len(embeddings)} {embeddings.dim}\n")
    for cid, row in zip(embeddings.courses, embeddings.matrix):
        if " " in cid:
            raise DataError(f"course id {cid!r} contains a space")
        stream.write(cid + " " + " ".join(format(x, ".9g") for x in row) + "\n")


def save_embeddings(embeddings: DenseEmbeddingSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        write_embeddings(embeddings, f)


def read_embeddings(stream: IO[str], provenance: str = "") -> DenseEmbeddingSet:
    courses: list[str] = []
    rows: list[np.ndarray] = []
    header = stream.readline()
    parts = header.split()
    if len(parts) != 2:
        raise EmbeddingFormatError("expected header '<count> <dim>'", line=1)
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise EmbeddingFormatError("non-integer header fields", line=1) from None
    for lineno, line in enumerate(stream, start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != dim + 1:
            raise EmbeddingFormatError(
                f"expected {dim + 1} fields, got {len(fields)}", line=lineno
            )
        try:
            rows.append(np.array([float(x) for x in fields[1:]], dtype=np.float64))
        except ValueError:
            raise EmbeddingFormatError("unparseable float", line=lineno) from None
        courses.append(fields[0])
    if len(courses) != count:
        raise EmbeddingFormatError(
            f"header declared {count} rows, file has {len(courses)}", line=1
        )
    matrix = np.stack(rows) if rows else np.zeros((0, dim))
    return DenseEmbeddingSet(courses=courses, matrix=matrix, provenance=provenance)


def load_embeddings(path: str, provenance: str | None = None) -> DenseEmbeddingSet:
    with open(path, encoding="utf-8") as f:
        return read_embeddings(f, provenance if provenance is not None else str(path))
