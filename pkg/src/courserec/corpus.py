"""Enrollment data model: ingestion, filtering, and sequence serialization.

The corpus is a flat list of per-semester enrollment records plus a course
catalog. Training consumes one serialized course sequence per student,
ordered by semester with a seeded within-semester shuffle.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import IO, Iterable

import numpy as np

from .errors import DataError

__all__ = [
    "Term",
    "Semester",
    "Course",
    "EnrollmentRecord",
    "EnrollmentCorpus",
    "SerializedSequence",
    "SyntheticGroundTruth",
    "IngestReport",
    "ingest_enrollments",
    "load_corpus",
    "filter_min_enrollment",
    "serialize_sequences",
    "write_enrollments",
    "write_catalog",
    "read_pairs",
    "write_pairs",
    "read_quads",
    "write_quads",
    "read_line_list",
]


class Term(enum.IntEnum):
    """Academic term. Order within a year: Spring < Summer < Fall."""

    SPRING = 0
    SUMMER = 1
    FALL = 2

    @classmethod
    def parse(cls, text: str) -> "Term":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown term {text!r}") from None


@dataclass(frozen=True, order=True)
class Semester:
    year: int
    term: Term

    def __str__(self) -> str:
        return f"{self.term.name} {self.year}"


@dataclass(frozen=True)
class Course:
    id: str
    department: str
    number: str
    title: str
    description: str = ""
    instructors: frozenset[str] = frozenset()
    total_enrollment: int = 0

    def __post_init__(self):
        if not self.id:
            raise DataError("course id must be non-empty")
        if not self.department:
            raise DataError(f"course {self.id!r}: department must be non-empty")
        if self.total_enrollment < 0:
            raise DataError(f"course {self.id!r}: negative total_enrollment")


@dataclass(frozen=True)
class EnrollmentRecord:
    student_id: str
    semester: Semester
    course_id: str


@dataclass
class EnrollmentCorpus:
    """Enrollment records plus the catalog they refer to.

    Invariant: every record's course id exists in the catalog.
    """

    records: list[EnrollmentRecord]
    catalog: dict[str, Course]

    def course_counts(self) -> Counter:
        return Counter(r.course_id for r in self.records)

    def n_students(self) -> int:
        return len({r.student_id for r in self.records})

    def validate(self) -> None:
        for r in self.records:
            if r.course_id not in self.catalog:
                raise DataError(f"record references unknown course {r.course_id!r}")


@dataclass(frozen=True)
class SerializedSequence:
    student_id: str
    course_ids: tuple[str, ...]


@dataclass(frozen=True)
class SyntheticGroundTruth:
    equivalency_pairs: tuple[tuple[str, str], ...]
    analogy_quads: tuple[tuple[str, str, str, str], ...]


@dataclass
class IngestReport:
    n_ingested: int = 0
    n_rejected: int = 0
    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.n_rejected += 1
        self.warnings.append(message)


_ENROLLMENT_HEADER = ["student_id", "year", "term", "course_id"]


def _escape_id(raw: str) -> str:
    # The embedding text format is space-separated; ids must not contain spaces.
    return raw.strip().replace(" ", "_")


def read_catalog(
    catalog_stream: IO[str], report: IngestReport | None = None
) -> dict[str, Course]:
    """Parse a JSON-lines catalog; malformed or duplicate lines are rejected
    (and counted when a report is supplied)."""
    if report is None:
        report = IngestReport()
    catalog: dict[str, Course] = {}
    for lineno, line in enumerate(catalog_stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            course = Course(
                id=_escape_id(obj["id"]),
                department=obj["department"],
                number=str(obj.get("number", "")),
                title=obj.get("title", ""),
                description=obj.get("description", "") or "",
                instructors=frozenset(obj.get("instructors", ())),
            )
        except (json.JSONDecodeError, KeyError, TypeError, DataError) as exc:
            report.warn(f"catalog line {lineno}: rejected ({exc})")
            continue
        if course.id in catalog:
            report.warn(f"catalog line {lineno}: duplicate course id {course.id!r}")
            continue
        catalog[course.id] = course
    return catalog


def load_catalog(catalog_path: str) -> dict[str, Course]:
    with open(catalog_path, encoding="utf-8") as cat:
        return read_catalog(cat)


def ingest_enrollments(
    enrollment_stream: IO[str], catalog_stream: IO[str]
) -> tuple[EnrollmentCorpus, IngestReport]:
    """Parse a catalog (JSON lines) and an enrollment CSV into a corpus.

    Malformed rows and rows referencing unknown courses are rejected and
    counted in the report; duplicate (student, semester, course) triples keep
    the first occurrence.
    """
    report = IngestReport()
    catalog = read_catalog(catalog_stream, report)

    records: list[EnrollmentRecord] = []
    seen: set[tuple[str, Semester, str]] = set()
    reader = csv.reader(enrollment_stream)
    for lineno, row in enumerate(reader, start=1):
        if not row or (lineno == 1 and [c.strip() for c in row] == _ENROLLMENT_HEADER):
            continue
        if len(row) != 4:
            report.warn(f"enrollment line {lineno}: expected 4 columns, got {len(row)}")
            continue
        student_id, year_s, term_s, course_id = (c.strip() for c in row)
        course_id = _escape_id(course_id)
        try:
            semester = Semester(int(year_s), Term.parse(term_s))
        except ValueError as exc:
            report.warn(f"enrollment line {lineno}: {exc}")
            continue
        if not student_id:
            report.warn(f"enrollment line {lineno}: empty student id")
            continue
        if course_id not in catalog:
            report.warn(f"enrollment line {lineno}: unknown course {course_id!r}")
            continue
        key = (student_id, semester, course_id)
        if key in seen:
            report.warn(f"enrollment line {lineno}: duplicate record {key}")
            continue
        seen.add(key)
        records.append(EnrollmentRecord(student_id, semester, course_id))

    report.n_ingested = len(records)
    corpus = EnrollmentCorpus(records=records, catalog=_with_counts(catalog, records))
    return corpus, report


def load_corpus(enrollment_path: str, catalog_path: str) -> tuple[EnrollmentCorpus, IngestReport]:
    with open(catalog_path, encoding="utf-8") as cat, open(
        enrollment_path, encoding="utf-8", newline=""
    ) as enr:
        return ingest_enrollments(enr, cat)


def _with_counts(
    catalog: dict[str, Course], records: list[EnrollmentRecord]
) -> dict[str, Course]:
    counts = Counter(r.course_id for r in records)
    return {
        cid: replace(course, total_enrollment=counts.get(cid, 0))
        for cid, course in catalog.items()
    }


def filter_min_enrollment(corpus: EnrollmentCorpus, min_total: int) -> EnrollmentCorpus:
    """Drop courses (and their records) with fewer than ``min_total`` records."""
    if min_total < 0:
        raise DataError("min_total must be >= 0")
    counts = corpus.course_counts()
    keep = {cid for cid in corpus.catalog if counts.get(cid, 0) >= min_total}
    records = [r for r in corpus.records if r.course_id in keep]
    catalog = {cid: c for cid, c in corpus.catalog.items() if cid in keep}
    return EnrollmentCorpus(records=records, catalog=_with_counts(catalog, records))


def _semester_shuffle_seed(seed: int, student_id: str, semester: Semester) -> int:
    """Stable per-(seed, student, semester) shuffle seed, independent of
    Python's hash randomization."""
    key = f"{seed}|{student_id}|{semester.year}|{semester.term.name}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def serialize_sequences(corpus: EnrollmentCorpus, seed: int) -> list[SerializedSequence]:
    """One chronological course sequence per student.

    Semesters ascend; within a semester the course order is a seeded random
    permutation that is a pure function of (seed, student, semester), so the
    same corpus and seed always serialize identically.
    """
    by_student: dict[str, dict[Semester, list[str]]] = defaultdict(lambda: defaultdict(list))
    for r in corpus.records:
        by_student[r.student_id][r.semester].append(r.course_id)

    sequences = []
    for student_id in sorted(by_student):
        ordered: list[str] = []
        for semester in sorted(by_student[student_id]):
            basket = sorted(by_student[student_id][semester])
            rng = np.random.default_rng(_semester_shuffle_seed(seed, student_id, semester))
            ordered.extend(basket[i] for i in rng.permutation(len(basket)))
        sequences.append(SerializedSequence(student_id, tuple(ordered)))
    return sequences


# --- flat-file round trips ---------------------------------------------------


def write_enrollments(corpus: EnrollmentCorpus, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(_ENROLLMENT_HEADER)
    for r in sorted(
        corpus.records, key=lambda r: (r.student_id, r.semester, r.course_id)
    ):
        writer.writerow([r.student_id, r.semester.year, r.semester.term.name, r.course_id])


def write_catalog(corpus: EnrollmentCorpus, stream: IO[str]) -> None:
    for cid in sorted(corpus.catalog):
        c = corpus.catalog[cid]
        stream.write(
            json.dumps(
                {
                    "id": c.id,
                    "department": c.department,
                    "number": c.number,
                    "title": c.title,
                    "description": c.description,
                    "instructors": sorted(c.instructors),
                },
                ensure_ascii=False,
            )
            + "\n"
        )


def write_pairs(pairs: Iterable[tuple[str, str]], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["course_a", "course_b"])
    for a, b in pairs:
        writer.writerow([a, b])


def read_pairs(stream: IO[str]) -> list[tuple[str, str]]:
    pairs = []
    for lineno, row in enumerate(csv.reader(stream), start=1):
        if not row:
            continue
        if lineno == 1 and [c.strip() for c in row] == ["course_a", "course_b"]:
            continue
        if len(row) != 2:
            raise DataError(f"equivalency line {lineno}: expected 2 columns")
        pairs.append((row[0].strip(), row[1].strip()))
    return pairs


def write_quads(quads: Iterable[tuple[str, str, str, str]], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["c1", "c2", "c3", "c4"])
    for quad in quads:
        writer.writerow(list(quad))


def read_quads(stream: IO[str]) -> list[tuple]:
    """Read analogy quads; an optional 5th column is kept as a category label."""
    quads = []
    for lineno, row in enumerate(csv.reader(stream), start=1):
        if not row:
            continue
        stripped = [c.strip() for c in row]
        if lineno == 1 and stripped[:4] == ["c1", "c2", "c3", "c4"]:
            continue
        if len(stripped) not in (4, 5):
            raise DataError(f"analogy line {lineno}: expected 4 or 5 columns")
        quads.append(tuple(stripped))
    return quads


def read_line_list(stream: IO[str]) -> list[str]:
    """One entry per line; blank lines ignored (stopword/boilerplate lists)."""
    return [line.strip() for line in stream if line.strip()]
