"""Seeded synthetic enrollment corpora with planted ground truth.

The generated world is topic-clustered: topics double as departments, each
student leans (p = 0.8) toward their own topic's courses, and selected course
pairs are planted as honors twins (same department, same instructors, and an
identical description) which serve as equivalency pairs. Analogy quads pair
two honors twins from different topics, so the honors relation is the planted
vector offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .corpus import Course, EnrollmentCorpus, EnrollmentRecord, Semester, SyntheticGroundTruth, Term
from .errors import InfeasibleSpecError

__all__ = ["SynthSpec", "generate_synthetic_corpus", "DEFAULT_BOILERPLATE", "DEFAULT_STOPWORDS"]

DEFAULT_BOILERPLATE = (
    "This course satisfies the general elective requirement.",
)

DEFAULT_STOPWORDS = (
    "a an and are as at be by for from has have in into is it its of on or "
    "that the their this these those to was were will with students course "
    "courses topics include includes introduction study studies"
).split()

_SYLLABLES = [
    "ba", "ce", "di", "fo", "gu", "ha", "je", "ki", "lo", "mu",
    "na", "pe", "qui", "ro", "su", "ta", "ve", "wi", "xo", "zu",
]

_OWN_TOPIC_PROB = 0.8
_TOPIC_POOL_SIZE = 12
_FIRST_YEAR = 2018


@dataclass(frozen=True)
class SynthSpec:
    n_students: int = 500
    n_topics: int = 2
    courses_per_topic: int = 10
    semesters: int = 4
    basket_size: int = 4
    n_equiv_pairs: int = 4
    n_analogy_quads: int = 4
    seed: int = 42

    def validate(self) -> None:
        for name in ("n_students", "n_topics", "courses_per_topic", "semesters", "basket_size"):
            if getattr(self, name) < 1:
                raise InfeasibleSpecError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_equiv_pairs < 0 or self.n_analogy_quads < 0:
            raise InfeasibleSpecError("ground-truth counts must be >= 0")
        n_courses = self.n_topics * self.courses_per_topic
        if self.basket_size > n_courses:
            raise InfeasibleSpecError(
                f"basket_size {self.basket_size} exceeds catalog size {n_courses}"
            )
        slots_per_topic = self.courses_per_topic // 2
        if self.n_equiv_pairs > self.n_topics * slots_per_topic:
            raise InfeasibleSpecError(
                f"cannot plant {self.n_equiv_pairs} equivalency pairs: only "
                f"{self.n_topics * slots_per_topic} twin slots exist"
            )
        n_cross = (
            self.n_topics * (self.n_topics - 1) // 2 * slots_per_topic * slots_per_topic
        )
        if self.n_analogy_quads > n_cross:
            raise InfeasibleSpecError(
                f"cannot plant {self.n_analogy_quads} analogy quads: only "
                f"{n_cross} cross-topic twin combinations exist"
            )


def _make_word(rng: np.random.Generator) -> str:
    n = int(rng.integers(2, 4))
    return "".join(_SYLLABLES[int(rng.integers(0, len(_SYLLABLES)))] for _ in range(n))


def _word_pool(rng: np.random.Generator, size: int) -> list[str]:
    pool: list[str] = []
    seen = set()
    while len(pool) < size:
        w = _make_word(rng)
        if w not in seen:
            seen.add(w)
            pool.append(w)
    return pool


def _description(rng: np.random.Generator, pool: list[str]) -> str:
    words = [pool[i] for i in rng.choice(len(pool), size=6, replace=False)]
    first = f"Introduction to {words[0]} {words[1]} and the study of {words[2]}."
    second = f"Topics include {words[3]}, {words[4]}, and {words[5]}."
    return f"{first} {second} {DEFAULT_BOILERPLATE[0]}"


def _semesters(n: int) -> list[Semester]:
    out = []
    year, term = _FIRST_YEAR, Term.FALL
    for _ in range(n):
        out.append(Semester(year, term))
        if term is Term.FALL:
            year, term = year + 1, Term.SPRING
        else:
            term = Term.FALL
    return out


def generate_synthetic_corpus(spec: SynthSpec) -> tuple[EnrollmentCorpus, SyntheticGroundTruth]:
    """Generate a corpus plus planted equivalency/analogy ground truth.

    Fully deterministic given ``spec.seed``: calling twice yields byte-identical
    corpora and ground truth.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    slots_per_topic = spec.courses_per_topic // 2

    # Slot (t, m) can host an honors twin: courses 2m (base) and 2m+1 (twin).
    all_slots = [(t, m) for t in range(spec.n_topics) for m in range(slots_per_topic)]
    cross = [
        (a, b) for a, b in combinations(all_slots, 2) if a[0] != b[0]
    ]
    quad_slots = [cross[i] for i in rng.choice(len(cross), size=spec.n_analogy_quads, replace=False)] if spec.n_analogy_quads else []
    equiv_slots = [all_slots[i] for i in rng.choice(len(all_slots), size=spec.n_equiv_pairs, replace=False)] if spec.n_equiv_pairs else []
    planted_set = set(equiv_slots) | {s for pair in quad_slots for s in pair}

    # Per-topic vocabulary and instructor pools.
    topic_pools = [_word_pool(rng, _TOPIC_POOL_SIZE) for _ in range(spec.n_topics)]
    n_instructors = max(2, spec.courses_per_topic // 2)
    instructor_pools = [
        [f"I{t:02d}_{i:02d}" for i in range(n_instructors)] for t in range(spec.n_topics)
    ]

    def course_id(t: int, idx: int) -> str:
        dept = f"D{t + 1:02d}"
        m, is_twin = divmod(idx, 2)
        if is_twin and (t, m) in planted_set:
            return f"{dept}_{100 + 2 * m}H"
        return f"{dept}_{100 + idx}"
    catalog: dict[str, Course] = {}
    topic_of: dict[str, int] = {}
    for t in range(spec.n_topics):
        dept = f"D{t + 1:02d}"
        idx = 0
        while idx < spec.courses_per_topic:
            m, is_twin = divmod(idx, 2)
            pool = topic_pools[t]
            words = [pool[i] for i in rng.choice(len(pool), size=2, replace=False)]
            title = f"{words[0].capitalize()} {words[1].capitalize()}"
            description = _description(rng, pool)
            picks = rng.choice(len(instructor_pools[t]), size=int(rng.integers(1, 3)), replace=False)
            instructors = frozenset(instructor_pools[t][i] for i in picks)
            cid = course_id(t, idx)
            catalog[cid] = Course(
                id=cid,
                department=dept,
                number=cid.split("_", 1)[1],
                title=title,
                description=description,
                instructors=instructors,
            )
            topic_of[cid] = t
            if not is_twin and (t, m) in planted_set:
                # Honors twin: identical description and staff, honors title.
                twin_id = course_id(t, idx + 1)
                catalog[twin_id] = Course(
                    id=twin_id,
                    department=dept,
                    number=twin_id.split("_", 1)[1],
                    title=f"Honors {title}",
                    description=description,
                    instructors=instructors,
                )
                topic_of[twin_id] = t
                idx += 2
            else:
                idx += 1

    by_topic = [
        [cid for cid in catalog if topic_of[cid] == t] for t in range(spec.n_topics)
    ]
    all_ids = list(catalog)
    semesters = _semesters(spec.semesters)

    records: list[EnrollmentRecord] = []
    for s in range(spec.n_students):
        student_id = f"S{s:05d}"
        topic = s % spec.n_topics
        own = by_topic[topic]
        for semester in semesters:
            basket: set[str] = set()
            while len(basket) < spec.basket_size:
                use_own = rng.random() < _OWN_TOPIC_PROB and spec.n_topics > 1
                pool = own if (use_own or spec.n_topics == 1) else [
                    c for c in all_ids if topic_of[c] != topic
                ]
                remaining = [c for c in pool if c not in basket]
                if not remaining:
                    remaining = [c for c in all_ids if c not in basket]
                basket.add(remaining[int(rng.integers(0, len(remaining)))])
            for cid in sorted(basket):
                records.append(EnrollmentRecord(student_id, semester, cid))

    def slot_ids(slot: tuple[int, int]) -> tuple[str, str]:
        t, m = slot
        return course_id(t, 2 * m), course_id(t, 2 * m + 1)

    equivalency = tuple(slot_ids(s) for s in equiv_slots)
    quads = tuple(
        (*slot_ids(a), *slot_ids(b)) for a, b in quad_slots
    )

    counts = {cid: 0 for cid in catalog}
    for r in records:
        counts[r.course_id] += 1
    catalog = {
        cid: Course(
            id=c.id, department=c.department, number=c.number, title=c.title,
            description=c.description, instructors=c.instructors,
            total_enrollment=counts[cid],
        )
        for cid, c in catalog.items()
    }

    corpus = EnrollmentCorpus(records=records, catalog=catalog)
    truth = SyntheticGroundTruth(equivalency_pairs=equivalency, analogy_quads=quads)
    return corpus, truth
