"""Seeded synthetic corpus generator: determinism, planted structure."""

import io
from collections import defaultdict

import pytest

from courserec.corpus import write_catalog, write_enrollments
from courserec.errors import InfeasibleSpecError
from courserec.synthetic import SynthSpec, generate_synthetic_corpus

SMALL = SynthSpec(n_students=60, semesters=3, seed=5)


def _dump(corpus):
    cat = io.StringIO()
    write_catalog(corpus, cat)
    enr = io.StringIO()
    write_enrollments(corpus, enr)
    return cat.getvalue(), enr.getvalue()


def test_identical_seeds_produce_identical_bytes():
    a_corpus, a_truth = generate_synthetic_corpus(SMALL)
    b_corpus, b_truth = generate_synthetic_corpus(SMALL)
    assert _dump(a_corpus) == _dump(b_corpus)
    assert a_truth == b_truth


def test_different_seeds_differ():
    a_corpus, _ = generate_synthetic_corpus(SMALL)
    b_corpus, _ = generate_synthetic_corpus(SynthSpec(n_students=60, semesters=3, seed=6))
    assert _dump(a_corpus) != _dump(b_corpus)


def test_catalog_size_and_record_count():
    corpus, _ = generate_synthetic_corpus(SMALL)
    spec = SMALL
    assert len(corpus.catalog) == spec.n_topics * spec.courses_per_topic
    assert len(corpus.records) == spec.n_students * spec.semesters * spec.basket_size
    assert corpus.n_students() == spec.n_students


def test_departments_mirror_topics():
    corpus, _ = generate_synthetic_corpus(SMALL)
    departments = {c.department for c in corpus.catalog.values()}
    assert departments == {"D01", "D02"}
    for cid, c in corpus.catalog.items():
        assert cid.startswith(c.department)


def test_planted_twins_share_description_department_instructors():
    corpus, truth = generate_synthetic_corpus(SMALL)
    assert truth.equivalency_pairs
    for a, b in truth.equivalency_pairs:
        ca, cb = corpus.catalog[a], corpus.catalog[b]
        assert ca.description == cb.description
        assert ca.department == cb.department
        assert ca.instructors == cb.instructors
        assert b.endswith("H")


def test_ground_truth_ids_subset_of_catalog():
    corpus, truth = generate_synthetic_corpus(SMALL)
    ids = set(corpus.catalog)
    for a, b in truth.equivalency_pairs:
        assert {a, b} <= ids
    for quad in truth.analogy_quads:
        assert set(quad) <= ids


def test_analogy_quads_combine_two_twin_pairs_across_topics():
    corpus, truth = generate_synthetic_corpus(SMALL)
    for c1, c2, c3, c4 in truth.analogy_quads:
        d1 = corpus.catalog[c1].department
        d3 = corpus.catalog[c3].department
        assert d1 == corpus.catalog[c2].department
        assert d3 == corpus.catalog[c4].department
        assert d1 != d3
        assert corpus.catalog[c1].description == corpus.catalog[c2].description
        assert corpus.catalog[c3].description == corpus.catalog[c4].description


def test_planted_pairs_cooccur_with_their_topic():
    corpus, truth = generate_synthetic_corpus(SynthSpec())
    baskets = defaultdict(list)
    for r in corpus.records:
        baskets[(r.student_id, r.semester)].append(r.course_id)
    members = {c for pair in truth.equivalency_pairs for c in pair}
    for pair in truth.equivalency_pairs:
        dept = corpus.catalog[pair[0]].department
        containing = 0
        with_topic_neighbor = 0
        for basket in baskets.values():
            hit = [c for c in basket if c in pair]
            if not hit:
                continue
            containing += 1
            others = [c for c in basket if c not in pair]
            if any(corpus.catalog[c].department == dept for c in others):
                with_topic_neighbor += 1
        assert containing > 0
        assert with_topic_neighbor / containing >= 0.8, pair
    assert members  # planted structure exists


def test_every_description_carries_boilerplate_sentence():
    corpus, _ = generate_synthetic_corpus(SMALL)
    for c in corpus.catalog.values():
        assert "This course satisfies the general elective requirement." in c.description


@pytest.mark.parametrize(
    "spec",
    [
        SynthSpec(n_students=0),
        SynthSpec(basket_size=0),
        SynthSpec(basket_size=100),
        SynthSpec(n_equiv_pairs=1000),
        SynthSpec(n_analogy_quads=10_000),
        SynthSpec(n_topics=1, n_analogy_quads=1),
    ],
)
def test_infeasible_specs_rejected(spec):
    with pytest.raises(InfeasibleSpecError):
        generate_synthetic_corpus(spec)
