"""HTTP facade: course search, the Explore view, and rating capture.

Models are loaded once at startup from a registry config file and never
mutated, so all read endpoints are pure functions of the request.  Ratings
append to a JSON-lines log under a lock and are flushed to disk before the
request is acknowledged.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Mapping

from fastapi import FastAPI, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .corpus import Course, load_catalog
from .course2vec import extract_embeddings, load_checkpoint
from .errors import DataError, UnknownCourseError
from .recommender import (
    ROLE_BOW_DIV,
    ROLE_EQUIVALENCY,
    RecommendationList,
    build_explore_view,
)
from .vectorspace import DenseEmbeddingSet, load_embeddings

_KNOWN_ROLES = (ROLE_EQUIVALENCY, ROLE_BOW_DIV)


@dataclass
class ModelRegistry:
    """Immutable bundle of named embedding sets, their role bindings, and
    the catalog they describe."""

    catalog: dict[str, Course]
    sets: dict[str, DenseEmbeddingSet]
    roles: dict[str, str]

    def __post_init__(self) -> None:
        if not self.sets:
            raise DataError("registry has no models")
        for role, label in self.roles.items():
            if role not in _KNOWN_ROLES:
                raise DataError(f"unknown role {role!r}")
            if label not in self.sets:
                raise DataError(f"role {role!r} names unknown model {label!r}")
        for role in _KNOWN_ROLES:
            if role not in self.roles:
                raise DataError(f"registry missing role {role!r}")
        for label, embeddings in self.sets.items():
            if len(embeddings) == 0:
                raise DataError(f"model {label!r} is empty")
            missing = [cid for cid in embeddings.courses if cid not in self.catalog]
            if missing:
                raise DataError(
                    f"model {label!r} has courses without catalog metadata: "
                    + ", ".join(sorted(missing)[:5])
                )

    def set_for_role(self, role: str) -> DenseEmbeddingSet:
        return self.sets[self.roles[role]]

    def label_for_role(self, role: str) -> str:
        return self.roles[role]

    def role_of(self, label: str) -> str | None:
        for role, bound in self.roles.items():
            if bound == label:
                return role
        return None


def _load_model_file(path: Path, variant: str, label: str) -> DenseEmbeddingSet:
    if path.is_dir():
        params, _ = load_checkpoint(path)
        embeddings = extract_embeddings(params, variant)
    else:
        embeddings = load_embeddings(str(path))
    return DenseEmbeddingSet(
        courses=list(embeddings.courses), matrix=embeddings.matrix, provenance=label
    )


def load_registry(config_path: str | Path) -> ModelRegistry:
    """Build a registry from a JSON config file.

    Shape: {"catalog": path, "models": [{"label", "path", "variant"?}, ...],
    "roles": {"equivalency_model": label, "bow_div_model": label}}.
    Relative paths resolve against the config file's directory.
    """
    config_path = Path(config_path)
    try:
        config = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"registry config {config_path}: invalid JSON ({exc})") from None
    base = config_path.parent
    try:
        catalog_path = base / config["catalog"]
        model_entries = config["models"]
        roles = dict(config["roles"])
    except (KeyError, TypeError) as exc:
        raise DataError(f"registry config {config_path}: missing key {exc}") from None
    catalog = load_catalog(str(catalog_path))
    if not catalog:
        raise DataError(f"catalog {catalog_path} contains no courses")
    sets: dict[str, DenseEmbeddingSet] = {}
    for entry in model_entries:
        label = entry["label"]
        if label in sets:
            raise DataError(f"duplicate model label {label!r}")
        variant = entry.get("variant", "input")
        sets[label] = _load_model_file(base / entry["path"], variant, label)
    return ModelRegistry(catalog=catalog, sets=sets, roles=roles)


class RatingsLog:
    """Append-only JSON-lines rating store with sequential acknowledgment.

    Writes happen under a lock and are fsynced before the sequence number is
    returned, so an acknowledged rating survives a crash.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seq = self._count_lines()

    def _count_lines(self) -> int:
        if not self.path.exists():
            return 0
        with open(self.path, encoding="utf-8") as fh:
            return sum(1 for line in fh if line.strip())

    def append(self, record: Mapping) -> int:
        with self._lock:
            seq = self._seq + 1
            payload = dict(record)
            payload["seq"] = seq
            line = json.dumps(payload, sort_keys=True)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._seq = seq
            return seq


def search_courses(
    catalog: Mapping[str, Course], query: str, limit: int
) -> list[Course]:
    """Case-insensitive substring search over id, title, and department.

    Results order by exact-id match first, then earliest match position,
    then course id; the empty query matches everything.
    """
    needle = query.strip().lower()
    scored: list[tuple[int, int, str]] = []
    for cid, course in catalog.items():
        haystacks = (cid.lower(), course.title.lower(), course.department.lower())
        positions = [h.find(needle) for h in haystacks if needle in h]
        if not positions and needle:
            continue
        exact = 0 if needle == cid.lower() else 1
        best = min(positions) if positions else 0
        scored.append((exact, best, cid))
    scored.sort()
    return [catalog[cid] for _, _, cid in scored[: max(limit, 0)]]


class RatingPayload(BaseModel):
    """One submitted rating: three per-course Likert answers are required,
    the two list-level answers and free-text remark are optional."""

    model_config = ConfigDict(extra="forbid")

    session_id: str = Field(min_length=1, max_length=128)
    favorite: str = Field(min_length=1)
    rated_course: str = Field(min_length=1)
    panel: Literal["within", "across"]
    unexpectedness: int = Field(ge=1, le=5)
    interest: int = Field(ge=1, le=5)
    novelty: int = Field(ge=1, le=5)
    list_diversity: int | None = Field(default=None, ge=1, le=5)
    list_commonality: int | None = Field(default=None, ge=1, le=5)
    commonality_text: str | None = Field(default=None, max_length=4000)
    timestamp: datetime | None = None


def _course_summary(course: Course) -> dict:
    return {
        "id": course.id,
        "department": course.department,
        "number": course.number,
        "title": course.title,
    }


def _course_detail(course: Course) -> dict:
    summary = _course_summary(course)
    summary["description"] = course.description
    return summary


def _panel_json(panel: RecommendationList, catalog: Mapping[str, Course]) -> list[dict]:
    out = []
    for entry in panel.entries:
        course = catalog[entry.course_id]
        out.append(
            {
                "id": course.id,
                "department": course.department,
                "number": course.number,
                "title": course.title,
                "description": course.description,
                "score": entry.score,
                "rank": entry.rank,
            }
        )
    return out


def _error_body(code: str, message: str, **extra) -> dict:
    body = {"error": {"code": code, "message": message}}
    body["error"].update(extra)
    return body


def create_app(
    registry: ModelRegistry,
    ratings_log: RatingsLog,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Assemble the HTTP application over an already-loaded registry."""
    app = FastAPI(title="course recommendation service", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request, exc):
        fields = sorted(
            {
                ".".join(str(piece) for piece in err["loc"][1:]) or "body"
                for err in exc.errors()
            }
        )
        return JSONResponse(
            status_code=400,
            content=_error_body("validation_error", "invalid request", fields=fields),
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/courses")
    def courses(
        q: str = Query(default=""), limit: int = Query(default=10, ge=1, le=100)
    ) -> list[dict]:
        return [_course_summary(c) for c in search_courses(registry.catalog, q, limit)]

    @app.get("/api/models")
    def models() -> list[dict]:
        out = []
        for label in sorted(registry.sets):
            embeddings = registry.sets[label]
            out.append(
                {
                    "label": label,
                    "dim": embeddings.dim,
                    "n_courses": len(embeddings),
                    "role": registry.role_of(label),
                }
            )
        return out

    @app.get("/api/explore")
    def explore(course_id: str = Query()):
        try:
            view = build_explore_view(course_id, registry)
        except UnknownCourseError:
            return JSONResponse(
                status_code=404,
                content=_error_body("unknown_course", f"unknown course {course_id!r}"),
            )
        return {
            "favorite": _course_detail(registry.catalog[course_id]),
            "within_department": _panel_json(view.within_department, registry.catalog),
            "across_departments": _panel_json(view.across_departments, registry.catalog),
            "within_reason": view.within_department.reason,
            "across_reason": view.across_departments.reason,
        }

    @app.post("/api/ratings")
    def post_rating(payload: RatingPayload):
        bad_fields = [
            name
            for name in ("favorite", "rated_course")
            if getattr(payload, name) not in registry.catalog
        ]
        if bad_fields:
            return JSONResponse(
                status_code=400,
                content=_error_body(
                    "validation_error", "unknown course id", fields=bad_fields
                ),
            )
        stamp = payload.timestamp or datetime.now(timezone.utc)
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        record = payload.model_dump(exclude={"timestamp"})
        record["timestamp"] = stamp.astimezone(timezone.utc).isoformat()
        seq = ratings_log.append(record)
        return {"seq": seq}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
