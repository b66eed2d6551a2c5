"""Exception hierarchy shared across the engine."""


class CourseRecError(Exception):
    """Base class for all engine errors."""


class DataError(CourseRecError):
    """Semantically invalid data: empty corpora, unknown ids, infeasible specs."""


class UnknownCourseError(DataError):
    def __init__(self, course_id: str):
        super().__init__(f"unknown course id: {course_id!r}")
        self.course_id = course_id


class EmptyCorpusError(DataError):
    pass


class InfeasibleSpecError(DataError):
    pass


class EmbeddingFormatError(DataError):
    """Malformed embedding or matrix file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ZeroVectorError(CourseRecError):
    """Cosine similarity is undefined for the zero vector."""
