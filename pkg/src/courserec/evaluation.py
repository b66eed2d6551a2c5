"""Rank-based scoring of embedding sets against validation ground truth.

Equivalency pairs are scored by the rank of the expected partner in the
cosine ranking around the first course; analogy quads by whether the
arithmetic completion retrieves the expected fourth course.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError
from .vectorspace import DenseEmbeddingSet, analogy_query, rank_by_cosine


@dataclass(frozen=True)
class EquivalencyReport:
    """Aggregate rank statistics for one model over one pair set."""

    model_label: str
    mean_rank: float
    median_rank: float
    recall_at_10: float
    n_pairs_evaluated: int
    n_skipped: int

    def to_dict(self) -> dict:
        return {
            "model": self.model_label,
            "mean_rank": self.mean_rank,
            "median_rank": self.median_rank,
            "recall_at_10": self.recall_at_10,
            "n_pairs_evaluated": self.n_pairs_evaluated,
            "n_skipped": self.n_skipped,
        }


@dataclass(frozen=True)
class AnalogyReport:
    """Aggregate completion accuracy for one model over one quad set."""

    model_label: str
    accuracy: float
    recall_at_10: float
    n_quads_evaluated: int
    n_skipped: int
    per_category: dict[str, tuple[float, float, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "model": self.model_label,
            "accuracy": self.accuracy,
            "recall_at_10": self.recall_at_10,
            "n_quads_evaluated": self.n_quads_evaluated,
            "n_skipped": self.n_skipped,
        }
        if self.per_category:
            out["per_category"] = {
                cat: {"accuracy": a, "recall_at_10": r, "n": n}
                for cat, (a, r, n) in sorted(self.per_category.items())
            }
        return out


def _median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def equivalency_rank(
    embeddings: DenseEmbeddingSet, probe: str, expected: str
) -> int:
    """Rank of expected in the cosine ranking around probe (probe excluded).

    Rank 1 means most similar.  When either endpoint is a zero vector the
    ranking cannot place the pair, so the pessimal rank (the number of
    courses in the set) is returned instead.
    """
    pessimal = len(embeddings)
    if embeddings.is_zero(probe) or embeddings.is_zero(expected):
        return pessimal
    ranking = rank_by_cosine(embeddings, embeddings.vector(probe), exclude={probe})
    for position, entry in enumerate(ranking.entries, start=1):
        if entry.course_id == expected:
            return position
    return pessimal


def eval_equivalency(
    embeddings: DenseEmbeddingSet,
    pairs: Iterable[tuple[str, str]],
) -> EquivalencyReport:
    """Score ordered pairs (probe, expected); skips pairs not fully in-vocab."""
    ranks: list[int] = []
    skipped = 0
    for a, b in pairs:
        if a not in embeddings or b not in embeddings:
            skipped += 1
            continue
        ranks.append(equivalency_rank(embeddings, a, b))
    if not ranks:
        raise DataError("no equivalency pair has both courses in the embedding set")
    return EquivalencyReport(
        model_label=embeddings.provenance,
        mean_rank=sum(ranks) / len(ranks),
        median_rank=_median(ranks),
        recall_at_10=sum(1 for r in ranks if r <= 10) / len(ranks),
        n_pairs_evaluated=len(ranks),
        n_skipped=skipped,
    )


def analogy_rank(
    embeddings: DenseEmbeddingSet, c1: str, c2: str, c3: str, c4: str
) -> int:
    """Rank of c4 among completions of c2 - c1 + c3 (first three excluded)."""
    pessimal = len(embeddings)
    ranking = analogy_query(embeddings, c1, c2, c3, k=len(embeddings))
    if ranking.undefined_query or embeddings.is_zero(c4):
        return pessimal
    for position, entry in enumerate(ranking.entries, start=1):
        if entry.course_id == c4:
            return position
    return pessimal


def eval_analogy(
    embeddings: DenseEmbeddingSet,
    quads: Iterable[Sequence[str]],
) -> AnalogyReport:
    """Score quads (c1,c2,c3,c4[,category]); skips quads not fully in-vocab.

    A quad is accurate when c4 is the top completion of c2 - c1 + c3 with
    the other three courses excluded; recall@10 counts ranks of 10 or less.
    """
    ranks: list[int] = []
    categories: list[str | None] = []
    skipped = 0
    for quad in quads:
        c1, c2, c3, c4 = quad[0], quad[1], quad[2], quad[3]
        category = quad[4] if len(quad) > 4 else None
        if any(c not in embeddings for c in (c1, c2, c3, c4)):
            skipped += 1
            continue
        ranks.append(analogy_rank(embeddings, c1, c2, c3, c4))
        categories.append(category)
    if not ranks:
        raise DataError("no analogy quad has all four courses in the embedding set")

    def summarize(subset: list[int]) -> tuple[float, float]:
        acc = sum(1 for r in subset if r == 1) / len(subset)
        rec = sum(1 for r in subset if r <= 10) / len(subset)
        return acc, rec

    accuracy, recall = summarize(ranks)
    per_category: dict[str, tuple[float, float, int]] = {}
    if any(c is not None for c in categories):
        buckets: dict[str, list[int]] = {}
        for r, cat in zip(ranks, categories):
            buckets.setdefault(cat or "uncategorized", []).append(r)
        for cat, subset in buckets.items():
            a, rec10 = summarize(subset)
            per_category[cat] = (a, rec10, len(subset))
    return AnalogyReport(
        model_label=embeddings.provenance,
        accuracy=accuracy,
        recall_at_10=recall,
        n_quads_evaluated=len(ranks),
        n_skipped=skipped,
        per_category=per_category,
    )


def _format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [header] + rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def equivalency_table(reports: Sequence[EquivalencyReport]) -> str:
    """Aligned text table: Model / Mean / Median / Recall@10."""
    rows = [
        [r.model_label, f"{r.mean_rank:.2f}", f"{r.median_rank:.1f}", f"{r.recall_at_10:.3f}"]
        for r in reports
    ]
    return _format_table(["Model", "Mean", "Median", "Recall@10"], rows)


def analogy_table(reports: Sequence[AnalogyReport]) -> str:
    """Aligned text table: Model / Accuracy / Recall@10."""
    rows = [
        [r.model_label, f"{r.accuracy:.3f}", f"{r.recall_at_10:.3f}"] for r in reports
    ]
    return _format_table(["Model", "Accuracy", "Recall@10"], rows)
