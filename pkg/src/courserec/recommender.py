"""Serendipitous recommendation surfacing.

Two ranking styles over a favorite course: plain top-k cosine neighbors
(optionally restricted to one department) and a department-diversified list
that keeps only each department's best-scoring course.  The Explore view
composes both into the two-panel display served to students.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Collection, Mapping

from .corpus import Course
from .errors import DataError, UnknownCourseError
from .vectorspace import DenseEmbeddingSet, RankedEntry, rank_by_cosine

ROLE_EQUIVALENCY = "equivalency_model"
ROLE_BOW_DIV = "bow_div_model"

REASON_NOT_IN_MODEL = "favorite not in model vocabulary"
REASON_UNRANKABLE = "favorite is unrankable (zero vector)"

EXPLORE_PANEL_SIZE = 5


@dataclass(frozen=True)
class Recommendation:
    course_id: str
    department: str
    score: float
    rank: int


@dataclass
class RecommendationList:
    """Ordered recommendations for one favorite under one model.

    ``reason`` is set only when the list is empty because the favorite could
    not be ranked under this model, naming the cause.
    """

    favorite: str
    model_label: str
    entries: list[Recommendation] = field(default_factory=list)
    diversified: bool = False
    reason: str | None = None

    def ids(self) -> list[str]:
        return [e.course_id for e in self.entries]


@dataclass
class ExploreView:
    """Two-panel display: same-department similars and cross-department
    diversified similars."""

    favorite: str
    within_department: RecommendationList
    across_departments: RecommendationList


def _course_number(course: Course) -> int | None:
    match = re.match(r"(\d+)", course.number)
    return int(match.group(1)) if match else None


def _department_of(catalog: Mapping[str, Course], course_id: str) -> str:
    try:
        return catalog[course_id].department
    except KeyError:
        raise DataError(f"course {course_id!r} has no catalog metadata") from None


def _candidate_entries(
    embeddings: DenseEmbeddingSet,
    catalog: Mapping[str, Course],
    favorite: str,
    allowed: Collection[str] | None,
    graduate_number_floor: int | None,
) -> list[RankedEntry] | None:
    """Full cosine ranking around the favorite after availability filters.

    Returns None when the favorite itself cannot be ranked (zero vector).
    """
    if favorite not in embeddings:
        raise UnknownCourseError(favorite)
    ranking = rank_by_cosine(embeddings, embeddings.vector(favorite), exclude={favorite})
    if ranking.undefined_query:
        return None
    entries = ranking.entries
    if allowed is not None:
        allowed = set(allowed)
        entries = [e for e in entries if e.course_id in allowed]
    if graduate_number_floor is not None:
        kept = []
        for e in entries:
            number = _course_number(catalog[e.course_id]) if e.course_id in catalog else None
            if number is None or number < graduate_number_floor:
                kept.append(e)
        entries = kept
    return entries


def _to_recommendations(
    entries: list[RankedEntry], catalog: Mapping[str, Course]
) -> list[Recommendation]:
    return [
        Recommendation(
            course_id=e.course_id,
            department=_department_of(catalog, e.course_id),
            score=e.score,
            rank=i,
        )
        for i, e in enumerate(entries, start=1)
    ]


def recommend_plain(
    embeddings: DenseEmbeddingSet,
    catalog: Mapping[str, Course],
    favorite: str,
    k: int,
    restrict_department: str | None = None,
    allowed: Collection[str] | None = None,
    graduate_number_floor: int | None = None,
) -> RecommendationList:
    """Top-k cosine neighbors of the favorite, favorite excluded.

    With restrict_department set, only courses of that department compete.
    """
    entries = _candidate_entries(embeddings, catalog, favorite, allowed, graduate_number_floor)
    result = RecommendationList(
        favorite=favorite, model_label=embeddings.provenance, diversified=False
    )
    if entries is None:
        result.reason = REASON_UNRANKABLE
        return result
    if restrict_department is not None:
        entries = [
            e for e in entries if _department_of(catalog, e.course_id) == restrict_department
        ]
    result.entries = _to_recommendations(entries[: max(k, 0)], catalog)
    return result


def recommend_diversified(
    embeddings: DenseEmbeddingSet,
    catalog: Mapping[str, Course],
    favorite: str,
    k: int,
    exclude_favorite_department: bool = False,
    allowed: Collection[str] | None = None,
    graduate_number_floor: int | None = None,
) -> RecommendationList:
    """Department-diversified top-k: each department contributes only its
    highest-scoring course, and departments are ranked by that score."""
    entries = _candidate_entries(embeddings, catalog, favorite, allowed, graduate_number_floor)
    result = RecommendationList(
        favorite=favorite, model_label=embeddings.provenance, diversified=True
    )
    if entries is None:
        result.reason = REASON_UNRANKABLE
        return result
    skip_department = (
        _department_of(catalog, favorite) if exclude_favorite_department else None
    )
    champions: list[RankedEntry] = []
    seen: set[str] = set()
    for e in entries:
        department = _department_of(catalog, e.course_id)
        if department == skip_department or department in seen:
            continue
        seen.add(department)
        champions.append(e)
        if len(champions) == max(k, 0):
            break
    result.entries = _to_recommendations(champions, catalog)
    return result


def build_explore_view(favorite: str, registry) -> ExploreView:
    """Compose the two Explore panels from the registry's role models.

    The within-department panel ranks same-department courses under the
    equivalency-role model; the across-departments panel shows one course
    per foreign department under the diversified bag-of-words model.  Each
    panel degrades independently when its model cannot rank the favorite.
    """
    catalog: Mapping[str, Course] = registry.catalog
    if favorite not in catalog:
        raise UnknownCourseError(favorite)
    equivalency_set = registry.set_for_role(ROLE_EQUIVALENCY)
    bow_set = registry.set_for_role(ROLE_BOW_DIV)
    if favorite not in equivalency_set and favorite not in bow_set:
        raise UnknownCourseError(favorite)
    department = catalog[favorite].department

    if favorite in equivalency_set:
        within = recommend_plain(
            equivalency_set, catalog, favorite, EXPLORE_PANEL_SIZE,
            restrict_department=department,
        )
    else:
        within = RecommendationList(
            favorite=favorite,
            model_label=equivalency_set.provenance,
            reason=REASON_NOT_IN_MODEL,
        )
    if favorite in bow_set:
        across = recommend_diversified(
            bow_set, catalog, favorite, EXPLORE_PANEL_SIZE,
            exclude_favorite_department=True,
        )
    else:
        across = RecommendationList(
            favorite=favorite,
            model_label=bow_set.provenance,
            diversified=True,
            reason=REASON_NOT_IN_MODEL,
        )
    return ExploreView(favorite=favorite, within_department=within, across_departments=across)
