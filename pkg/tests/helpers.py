"""Shared builders for test fixtures: tiny corpora, random embedding sets,
and random catalogs."""

from __future__ import annotations

import numpy as np

from courserec.corpus import Course, EnrollmentCorpus, EnrollmentRecord, Semester, Term
from courserec.vectorspace import DenseEmbeddingSet

TERMS = {"SPRING": Term.SPRING, "SUMMER": Term.SUMMER, "FALL": Term.FALL}


def course(
    cid: str,
    department: str = "DEP",
    number: str = "101",
    title: str | None = None,
    description: str = "",
    instructors=(),
) -> Course:
    return Course(
        id=cid,
        department=department,
        number=number,
        title=title if title is not None else f"Course {cid}",
        description=description,
        instructors=frozenset(instructors),
    )


def corpus_from(rows, catalog) -> EnrollmentCorpus:
    """rows: iterable of (student_id, year, term_name, course_id)."""
    records = [
        EnrollmentRecord(student, Semester(year, TERMS[term]), cid)
        for student, year, term, cid in rows
    ]
    return EnrollmentCorpus(records=records, catalog=dict(catalog))


def embedding_set(ids, matrix=None, provenance="test") -> DenseEmbeddingSet:
    """Accepts either (ids, matrix) or a single {course_id: row} mapping."""
    if matrix is None:
        ids = dict(ids)
        matrix = list(ids.values())
        ids = list(ids.keys())
    return DenseEmbeddingSet(
        courses=list(ids), matrix=np.asarray(matrix, dtype=np.float64), provenance=provenance
    )


def random_embedding_set(
    rng: np.random.Generator,
    n: int,
    dim: int,
    zero_fraction: float = 0.0,
    provenance: str = "random",
) -> DenseEmbeddingSet:
    ids = [f"C{i:03d}" for i in range(n)]
    matrix = rng.normal(size=(n, dim))
    n_zero = int(round(zero_fraction * n))
    if n_zero:
        for row in rng.choice(n, size=n_zero, replace=False):
            matrix[row] = 0.0
    return embedding_set(ids, matrix, provenance)


def random_catalog(ids, rng: np.random.Generator, n_departments: int):
    departments = [f"DP{i:02d}" for i in range(n_departments)]
    assignment = rng.integers(0, n_departments, size=len(ids))
    return {
        cid: course(cid, department=departments[assignment[i]], number=str(100 + i))
        for i, cid in enumerate(ids)
    }


def python_cosine(u, v) -> float:
    """Independent cosine route: pure-Python sequential arithmetic."""
    dot = 0.0
    nu = 0.0
    nv = 0.0
    for x, y in zip(u, v):
        dot += float(x) * float(y)
        nu += float(x) * float(x)
        nv += float(y) * float(y)
    return dot / ((nu ** 0.5) * (nv ** 0.5))
