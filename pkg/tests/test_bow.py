"""Bag-of-words schemes, hand-computed tf-idf, sparse cosine."""

import io
import math

import pytest

from courserec.bow import (
    build_term_index,
    sparse_cosine,
    to_embedding_set,
    vectorize,
    vectorize_catalog,
    write_sparse_csv,
)
from courserec.errors import DataError, ZeroVectorError
from courserec.vectorspace import rank_by_cosine

from helpers import course


def test_build_term_index_counts_document_frequency():
    index = build_term_index([["data", "science"], ["data", "art"]])
    assert index.n_documents == 2
    assert index.document_frequency == {"data": 2, "science": 1, "art": 1}
    assert sorted(index.columns.values()) == [0, 1, 2]


def test_duplicate_token_counts_once_for_df():
    index = build_term_index([["data", "data"], ["data"]])
    assert index.document_frequency["data"] == 2


def test_empty_document_contributes_no_terms():
    index = build_term_index([["alpha"], [], ["beta"]])
    assert set(index.columns) == {"alpha", "beta"}
    assert index.n_documents == 3


def test_empty_corpus_fatal():
    with pytest.raises(DataError):
        build_term_index([])


def test_tf_counts_raw_occurrences():
    index = build_term_index([["data", "science"], ["data", "art"]])
    vec = vectorize(["data", "data"], index, "tf")
    assert vec.entries == ((index.columns["data"], 2.0),)


def test_binary_idempotent_under_duplication():
    index = build_term_index([["data", "science"], ["data", "art"]])
    once = vectorize(["data", "science"], index, "binary")
    doubled = vectorize(["data", "data", "science", "science"], index, "binary")
    assert once == doubled
    assert all(w == 1.0 for _, w in once.entries)


def test_tfidf_hand_computed_two_documents():
    index = build_term_index([["data", "science"], ["data", "art"]])
    vec = vectorize(["data", "science"], index, "tfidf")
    # data appears in both documents: idf = ln(2/2) = 0, entry dropped
    cols = dict(vec.entries)
    assert index.columns["data"] not in cols
    assert cols[index.columns["science"]] == pytest.approx(math.log(2.0), abs=1e-12)


def test_tfidf_hand_computed_three_documents_exact():
    docs = [
        ["graph", "theory", "graph"],
        ["graph", "algebra"],
        ["logic"],
    ]
    index = build_term_index(docs)
    vec = vectorize(docs[0], index, "tfidf")
    weights = {
        term: dict(vec.entries).get(index.columns[term], 0.0)
        for term in ("graph", "theory", "algebra", "logic")
    }
    assert abs(weights["graph"] - 2.0 * math.log(3.0 / 2.0)) <= 1e-12
    assert abs(weights["theory"] - 1.0 * math.log(3.0 / 1.0)) <= 1e-12
    assert weights["algebra"] == 0.0
    assert weights["logic"] == 0.0


def test_oov_tokens_ignored():
    index = build_term_index([["data"]])
    assert vectorize(["unknown", "tokens"], index, "tf").is_zero()


def test_support_containment_binary_tf_tfidf():
    docs = [["a", "b", "c"], ["a", "b"], ["a"]]
    index = build_term_index(docs)
    doc = ["a", "a", "b", "c"]
    support = lambda v: {c for c, _ in v.entries}
    s_tf = support(vectorize(doc, index, "tf"))
    s_bin = support(vectorize(doc, index, "binary"))
    s_tfidf = support(vectorize(doc, index, "tfidf"))
    assert s_bin == s_tf
    assert s_tfidf <= s_tf
    # "a" occurs in every document so its tfidf weight vanishes
    assert index.columns["a"] in s_tf and index.columns["a"] not in s_tfidf


def test_unknown_scheme_rejected():
    index = build_term_index([["a"]])
    with pytest.raises(DataError):
        vectorize(["a"], index, "bm25")


def test_sparse_cosine_self_is_one_and_zero_raises():
    index = build_term_index([["a", "b"], ["b", "c"]])
    v = vectorize(["a", "b"], index, "tf")
    assert sparse_cosine(v, v) == pytest.approx(1.0)
    zero = vectorize(["zzz"], index, "tf")
    with pytest.raises(ZeroVectorError):
        sparse_cosine(v, zero)


def test_sparse_cosine_matches_dense_route():
    index = build_term_index([["a", "b", "c"], ["b", "c", "d"], ["d", "e"]])
    u = vectorize(["a", "b", "c", "c"], index, "tfidf")
    v = vectorize(["b", "c", "d"], index, "tfidf")
    du, dv = u.to_dense(), v.to_dense()
    expected = float(du @ dv / ((du @ du) ** 0.5 * (dv @ dv) ** 0.5))
    assert sparse_cosine(u, v) == pytest.approx(expected, abs=1e-12)


def test_zero_vector_courses_excluded_from_rankings():
    index = build_term_index([["a", "b"], ["a", "c"], []])
    vecs = [
        vectorize(["a", "b"], index, "tf"),
        vectorize(["a", "c"], index, "tf"),
        vectorize([], index, "tf"),
    ]
    embeddings = to_embedding_set(["X", "Y", "EMPTY"], vecs, provenance="tf")
    assert embeddings.zero_vector_ids() == ["EMPTY"]
    ranking = rank_by_cosine(embeddings, embeddings.vector("X"), exclude={"X"})
    assert "EMPTY" not in ranking.ids()


def test_vectorize_catalog_sorted_ids_and_boilerplate():
    catalog = {
        "B1": course("B1", description="Common words only."),
        "A1": course("A1", description="Graph theory. Common words only."),
    }
    ids, vectors, index = vectorize_catalog(
        catalog, "tf", boilerplate=("Common words only.",)
    )
    assert ids == ["A1", "B1"]
    assert vectors[1].is_zero()
    assert set(index.columns) == {"graph", "theori"}


def test_write_sparse_csv_format():
    index = build_term_index([["a", "b"]])
    vec = vectorize(["a", "b", "b"], index, "tf")
    buf = io.StringIO()
    write_sparse_csv(["X"], [vec], buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "course_id,column,weight"
    assert lines[1:] == ["X,0,1", "X,1,2"]
