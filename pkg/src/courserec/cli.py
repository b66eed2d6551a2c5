"""Command-line pipeline: synthesize, train, vectorize, combine, evaluate,
recommend, serve.

Exit codes: 0 success, 1 usage problems (bad flags, missing files),
2 data errors.  Output files are written to a temporary sibling and moved
into place, so an interrupted run never leaves a truncated artifact.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Callable, IO

from .bow import SCHEMES, to_embedding_set, vectorize_catalog, write_sparse_csv
from .corpus import (
    filter_min_enrollment,
    load_catalog,
    load_corpus,
    read_line_list,
    read_pairs,
    read_quads,
    write_catalog,
    write_enrollments,
    write_pairs,
    write_quads,
)
from .course2vec import (
    MODE_FULL_SOFTMAX,
    MODE_NEGATIVE_SAMPLING,
    TrainConfig,
    extract_embeddings,
    load_checkpoint,
    model_label,
    save_checkpoint,
    train,
)
from .errors import CourseRecError
from .evaluation import analogy_table, equivalency_table, eval_analogy, eval_equivalency
from .recommender import recommend_diversified, recommend_plain
from .synthetic import DEFAULT_BOILERPLATE, DEFAULT_STOPWORDS, SynthSpec, generate_synthetic_corpus
from .vectorspace import DenseEmbeddingSet, concat_sets, load_embeddings, write_embeddings

_FACTOR_CHOICES = ("instructor", "department")


class UsageError(Exception):
    """Raised for malformed invocations; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _atomic_text(path: Path, writer: Callable[[IO[str]], None]) -> None:
    """Write a text file through a temp sibling plus atomic rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _swap_into_place(tmp: Path, target: Path) -> None:
    if target.is_dir():
        shutil.rmtree(target)
    os.replace(tmp, target)


def _parse_factors(raw: str) -> tuple[str, ...]:
    tokens = [t.strip() for t in raw.split(",") if t.strip()]
    if tokens in ([], ["none"]):
        return ()
    for t in tokens:
        if t not in _FACTOR_CHOICES:
            raise UsageError(
                f"unknown factor {t!r}; choose from {', '.join(_FACTOR_CHOICES)} or none"
            )
    return tuple(tokens)


def _load_embedding_set(path: str, variant: str, label: str | None) -> DenseEmbeddingSet:
    """Load from an embedding text file or a checkpoint directory."""
    p = Path(path)
    if p.is_dir():
        params, _ = load_checkpoint(p)
        embeddings = extract_embeddings(params, variant)
    else:
        if not p.exists():
            raise FileNotFoundError(str(p))
        embeddings = load_embeddings(str(p), provenance=p.stem)
    if label:
        return DenseEmbeddingSet(
            courses=list(embeddings.courses), matrix=embeddings.matrix, provenance=label
        )
    return embeddings


def _read_word_list(path: str | None, default: tuple[str, ...]) -> tuple[str, ...]:
    if path is None:
        return default
    with open(path, encoding="utf-8") as fh:
        return tuple(read_line_list(fh))


def _print_warnings(warnings: list[str], limit: int = 10) -> None:
    for message in warnings[:limit]:
        print(f"warning: {message}", file=sys.stderr)
    if len(warnings) > limit:
        print(f"warning: ... and {len(warnings) - limit} more", file=sys.stderr)


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        n_students=args.students,
        n_topics=args.topics,
        courses_per_topic=args.courses_per_topic,
        semesters=args.semesters,
        basket_size=args.basket_size,
        n_equiv_pairs=args.equiv_pairs,
        n_analogy_quads=args.analogy_quads,
        seed=args.seed,
    )
    corpus, truth = generate_synthetic_corpus(spec)
    out = Path(args.out)
    _atomic_text(out / "catalog.jsonl", lambda fh: write_catalog(corpus, fh))
    _atomic_text(out / "enrollments.csv", lambda fh: write_enrollments(corpus, fh))
    _atomic_text(
        out / "equivalency_pairs.csv", lambda fh: write_pairs(truth.equivalency_pairs, fh)
    )
    _atomic_text(out / "analogy_quads.csv", lambda fh: write_quads(truth.analogy_quads, fh))
    print(
        f"wrote {len(corpus.catalog)} courses, {len(corpus.records)} enrollments, "
        f"{len(truth.equivalency_pairs)} equivalency pairs, "
        f"{len(truth.analogy_quads)} analogy quads -> {out}"
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    corpus, report = load_corpus(args.enrollments, args.catalog)
    _print_warnings(report.warnings)
    if args.min_enrollment > 0:
        corpus = filter_min_enrollment(corpus, args.min_enrollment)
    config = TrainConfig(
        dim=args.dim,
        window=args.window,
        epochs=args.epochs,
        initial_lr=args.initial_lr,
        min_lr=args.min_lr,
        mode=args.mode,
        negatives=args.negatives,
        factors=_parse_factors(args.factors),
        seed=args.seed,
        threads=args.threads,
    )
    params, train_report = train(corpus, config)
    for epoch, loss in enumerate(train_report.epoch_mean_loss, start=1):
        print(f"epoch {epoch}: mean loss {loss:.6f}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.parent / f".{out.name}.{os.getpid()}.tmp"
    try:
        save_checkpoint(tmp, params, config, train_report)
        _swap_into_place(tmp, out)
    except BaseException:
        if tmp.exists():
            shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(
        f"{model_label(config.canonical_factors())}: {params.n_courses} courses, "
        f"dim {config.dim} -> {out}"
    )
    return 0


def cmd_vectorize_bow(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    boilerplate = _read_word_list(args.boilerplate, DEFAULT_BOILERPLATE)
    stopwords = _read_word_list(args.stopwords, DEFAULT_STOPWORDS)
    course_ids, vectors, index = vectorize_catalog(catalog, args.scheme, boilerplate, stopwords)
    out = Path(args.out)
    if args.format == "sparse":
        _atomic_text(out, lambda fh: write_sparse_csv(course_ids, vectors, fh))
    else:
        embeddings = to_embedding_set(course_ids, vectors, provenance=args.scheme)
        _atomic_text(out, lambda fh: write_embeddings(embeddings, fh))
    unrankable = [cid for cid, vec in zip(course_ids, vectors) if vec.is_zero()]
    if unrankable:
        shown = ", ".join(unrankable[:10])
        print(
            f"warning: {len(unrankable)} courses are unrankable "
            f"(empty description after preprocessing): {shown}",
            file=sys.stderr,
        )
    print(
        f"{len(course_ids)} courses, {index.dimension} terms, "
        f"scheme {args.scheme} -> {out}"
    )
    return 0


def cmd_combine(args: argparse.Namespace) -> int:
    a = _load_embedding_set(args.a, args.variant, None)
    b = _load_embedding_set(args.b, args.variant, None)
    combined, drops = concat_sets(a, b, normalize_parts=args.normalize, provenance=args.label)
    _print_warnings(drops.lines())
    _atomic_text(Path(args.out), lambda fh: write_embeddings(combined, fh))
    print(
        f"{combined.provenance}: {len(combined)} courses, dim {combined.dim} -> {args.out}"
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    if not args.equivalency and not args.analogy:
        raise UsageError("eval: at least one of --equivalency or --analogy is required")
    embeddings = _load_embedding_set(args.embeddings, args.variant, args.label)
    results: dict = {}
    blocks: list[str] = []
    if args.equivalency:
        with open(args.equivalency, encoding="utf-8", newline="") as fh:
            pairs = read_pairs(fh)
        report = eval_equivalency(embeddings, pairs)
        blocks.append(equivalency_table([report]))
        results["equivalency"] = report.to_dict()
    if args.analogy:
        with open(args.analogy, encoding="utf-8", newline="") as fh:
            quads = read_quads(fh)
        report = eval_analogy(embeddings, quads)
        blocks.append(analogy_table([report]))
        results["analogy"] = report.to_dict()
    print("\n\n".join(blocks))
    if args.json_out:
        _atomic_text(
            Path(args.json_out),
            lambda fh: fh.write(json.dumps(results, indent=2, sort_keys=True) + "\n"),
        )
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    embeddings = _load_embedding_set(args.embeddings, args.variant, None)
    catalog = load_catalog(args.catalog)
    allowed = None
    if args.allowed:
        with open(args.allowed, encoding="utf-8") as fh:
            allowed = set(read_line_list(fh))
    if args.diversify:
        rec = recommend_diversified(
            embeddings,
            catalog,
            args.favorite,
            args.k,
            exclude_favorite_department=args.exclude_own_department,
            allowed=allowed,
            graduate_number_floor=args.graduate_floor,
        )
    else:
        rec = recommend_plain(
            embeddings,
            catalog,
            args.favorite,
            args.k,
            restrict_department=args.department,
            allowed=allowed,
            graduate_number_floor=args.graduate_floor,
        )
    print(f"favorite {rec.favorite} ({rec.model_label})")
    if rec.reason:
        print(f"no results: {rec.reason}")
        return 0
    header = f"{'Rank':<5} {'Course':<15} {'Department':<12} Score"
    print(header)
    for entry in rec.entries:
        print(
            f"{entry.rank:<5} {entry.course_id:<15} {entry.department:<12} "
            f"{entry.score:.4f}"
        )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import RatingsLog, create_app, load_registry

    registry = load_registry(args.registry)
    ratings_log = RatingsLog(args.ratings_log)
    app = create_app(registry, ratings_log, ui_dir=args.ui_dir)
    host, _, port_s = args.listen.rpartition(":")
    if not host or not port_s.isdigit():
        raise UsageError(f"serve: bad --listen {args.listen!r}, expected host:port")
    uvicorn.run(app, host=host, port=int(port_s), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="courserec", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--students", type=int, default=500)
    p.add_argument("--topics", type=int, default=2)
    p.add_argument("--courses-per-topic", type=int, default=10)
    p.add_argument("--semesters", type=int, default=4)
    p.add_argument("--basket-size", type=int, default=4)
    p.add_argument("--equiv-pairs", type=int, default=4)
    p.add_argument("--analogy-quads", type=int, default=4)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("train", help="train skip-gram course embeddings")
    p.add_argument("--enrollments", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True, help="checkpoint directory")
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--initial-lr", type=float, default=0.025)
    p.add_argument("--min-lr", type=float, default=1e-4)
    p.add_argument(
        "--mode", choices=(MODE_NEGATIVE_SAMPLING, MODE_FULL_SOFTMAX),
        default=MODE_NEGATIVE_SAMPLING,
    )
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument(
        "--factors", default="none",
        help="comma-separated subset of instructor,department, or none",
    )
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--min-enrollment", type=int, default=0)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("vectorize-bow", help="build bag-of-words vectors from a catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", choices=SCHEMES, default="tfidf")
    p.add_argument("--format", choices=("dense", "sparse"), default="dense")
    p.add_argument("--boilerplate", help="file with one boilerplate sentence per line")
    p.add_argument("--stopwords", help="file with one stopword per line")
    p.set_defaults(handler=cmd_vectorize_bow)

    p = sub.add_parser("combine", help="concatenate two embedding sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", action="store_true",
                   help="scale each part to unit length before concatenation")
    p.add_argument("--label", help="provenance label for the combined set")
    p.add_argument("--variant", choices=("input", "input_plus_out"), default="input",
                   help="embedding variant for checkpoint-directory inputs")
    p.set_defaults(handler=cmd_combine)

    p = sub.add_parser("eval", help="score embeddings against ground truth")
    p.add_argument("--embeddings", required=True,
                   help="embedding text file or checkpoint directory")
    p.add_argument("--variant", choices=("input", "input_plus_out"), default="input")
    p.add_argument("--label", help="model label override for report rows")
    p.add_argument("--equivalency", help="CSV of course_a,course_b pairs")
    p.add_argument("--analogy", help="CSV of c1,c2,c3,c4[,category] quads")
    p.add_argument("--json-out", help="also write the report as JSON")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("recommend", help="rank similar courses for a favorite")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--variant", choices=("input", "input_plus_out"), default="input")
    p.add_argument("--catalog", required=True)
    p.add_argument("--favorite", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--diversify", action="store_true",
                   help="keep only the best course per department")
    p.add_argument("--exclude-own-department", action="store_true")
    p.add_argument("--department", help="restrict plain results to one department")
    p.add_argument("--allowed", help="file listing offerable course ids, one per line")
    p.add_argument("--graduate-floor", type=int,
                   help="exclude courses whose number is at or above this value")
    p.set_defaults(handler=cmd_recommend)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--registry", required=True, help="registry config JSON")
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.add_argument("--ratings-log", default="ratings.jsonl")
    p.add_argument("--ui-dir", help="directory of static UI files to serve at /")
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "handler"):
            parser.print_usage(sys.stderr)
            return 1
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        missing = exc.filename if exc.filename else exc
        print(f"error: file not found: {missing}", file=sys.stderr)
        return 1
    except CourseRecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
