"""Skip-gram embeddings over enrollment sequences.

Courses are treated as tokens and each student's chronological enrollment
history as a sentence.  The input projection for a center course is the sum
of its own vector and one row per active attribute value (instructor,
department), so attribute matrices are trained jointly with the course
matrices.  Context probabilities come from either an exact softmax over the
catalog or from negative sampling against a unigram^0.75 noise distribution.
"""

from __future__ import annotations

import json
import math
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import EnrollmentCorpus, serialize_sequences
from .errors import DataError, EmptyCorpusError

MODE_NEGATIVE_SAMPLING = "negative_sampling"
MODE_FULL_SOFTMAX = "full_softmax"

FACTOR_INSTRUCTOR = "instructor"
FACTOR_DEPARTMENT = "department"

_FACTOR_ORDER = (FACTOR_INSTRUCTOR, FACTOR_DEPARTMENT)
_FACTOR_SHORT = {FACTOR_INSTRUCTOR: "ins", FACTOR_DEPARTMENT: "dept"}

VARIANT_INPUT = "input"
VARIANT_INPUT_PLUS_OUT = "input_plus_out"

_CHECKPOINT_FORMAT = "course-embedding-checkpoint-v1"


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run."""

    dim: int = 100
    window: int = 5
    epochs: int = 10
    initial_lr: float = 0.025
    min_lr: float = 1e-4
    mode: str = MODE_NEGATIVE_SAMPLING
    negatives: int = 5
    factors: tuple[str, ...] = ()
    seed: int = 1
    threads: int = 1

    def validate(self) -> None:
        if self.dim < 1:
            raise DataError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise DataError(f"window must be >= 1, got {self.window}")
        if self.epochs < 1:
            raise DataError(f"epochs must be >= 1, got {self.epochs}")
        if not (0.0 < self.min_lr <= self.initial_lr):
            raise DataError(
                f"need 0 < min_lr <= initial_lr, got {self.min_lr} and {self.initial_lr}"
            )
        if self.mode not in (MODE_NEGATIVE_SAMPLING, MODE_FULL_SOFTMAX):
            raise DataError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_NEGATIVE_SAMPLING and self.negatives < 1:
            raise DataError(f"negatives must be >= 1, got {self.negatives}")
        if self.threads < 1:
            raise DataError(f"threads must be >= 1, got {self.threads}")
        seen = set()
        for name in self.factors:
            if name not in _FACTOR_ORDER:
                raise DataError(f"unknown factor {name!r}")
            if name in seen:
                raise DataError(f"duplicate factor {name!r}")
            seen.add(name)

    def canonical_factors(self) -> tuple[str, ...]:
        """Factors in their fixed canonical order regardless of input order."""
        return tuple(f for f in _FACTOR_ORDER if f in self.factors)


def model_label(factors: Sequence[str], variant: str = VARIANT_INPUT) -> str:
    """Human-readable label such as 'course2vec' or 'ins-dept-course2vec (+out)'."""
    parts = [_FACTOR_SHORT[f] for f in _FACTOR_ORDER if f in factors]
    label = "-".join(parts + ["course2vec"]) if parts else "course2vec"
    if variant == VARIANT_INPUT_PLUS_OUT:
        label += " (+out)"
    return label


@dataclass
class ModelParams:
    """Learned matrices plus the vocabulary bookkeeping needed to use them.

    factor_rows[name][i] holds the row indices into factor_matrices[name]
    that are active for the course at vocabulary position i.
    """

    vocab: list[str]
    input_matrix: np.ndarray
    output_matrix: np.ndarray
    factor_names: tuple[str, ...] = ()
    factor_vocabs: dict[str, list[str]] = field(default_factory=dict)
    factor_matrices: dict[str, np.ndarray] = field(default_factory=dict)
    factor_rows: dict[str, list[np.ndarray]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.vocab)
        if len(set(self.vocab)) != n:
            raise DataError("duplicate course ids in model vocabulary")
        if self.input_matrix.shape != self.output_matrix.shape:
            raise DataError("input and output matrices must have the same shape")
        if self.input_matrix.shape[0] != n:
            raise DataError("matrix row count does not match vocabulary size")
        for name in self.factor_names:
            mat = self.factor_matrices[name]
            if mat.shape[1] != self.dim:
                raise DataError(f"factor {name!r} dimension mismatch")
            if mat.shape[0] != len(self.factor_vocabs[name]):
                raise DataError(f"factor {name!r} vocabulary size mismatch")
            if len(self.factor_rows[name]) != n:
                raise DataError(f"factor {name!r} assignment count mismatch")
        self._row = {cid: i for i, cid in enumerate(self.vocab)}

    @property
    def dim(self) -> int:
        return int(self.input_matrix.shape[1])

    @property
    def n_courses(self) -> int:
        return len(self.vocab)

    def row(self, course_id: str) -> int:
        try:
            return self._row[course_id]
        except KeyError:
            raise DataError(f"course {course_id!r} not in model vocabulary") from None

    def rows_for(self, center: int) -> dict[str, np.ndarray]:
        return {name: self.factor_rows[name][center] for name in self.factor_names}


@dataclass
class TrainingReport:
    """Per-run summary returned by train()."""

    mode: str
    n_sequences: int
    n_pairs_per_epoch: int
    vocab_size: int
    epoch_mean_loss: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_sequences": self.n_sequences,
            "n_pairs_per_epoch": self.n_pairs_per_epoch,
            "vocab_size": self.vocab_size,
            "epoch_mean_loss": self.epoch_mean_loss,
        }


def generate_training_pairs(
    tokens: Sequence[int], window: int
) -> list[tuple[int, int]]:
    """(center, context) pairs for every offset j with 0 < |j| <= window - 1.

    The context window is open at |j| = window, so window=2 pairs each token
    with its immediate neighbours only and window=1 yields no pairs.
    """
    pairs: list[tuple[int, int]] = []
    reach = window - 1
    n = len(tokens)
    for i, center in enumerate(tokens):
        lo = max(0, i - reach)
        hi = min(n, i + reach + 1)
        for j in range(lo, hi):
            if j != i:
                pairs.append((center, tokens[j]))
    return pairs


def compose_input(
    center: int,
    factor_rows: Mapping[str, Sequence[int]],
    params: ModelParams,
) -> np.ndarray:
    """Input projection: course vector plus the sum of active factor rows."""
    a = params.input_matrix[center].astype(np.float64, copy=True)
    for name, rows in factor_rows.items():
        if len(rows):
            a += params.factor_matrices[name][np.asarray(rows, dtype=np.intp)].sum(axis=0)
    return a


def softmax_prob(a: np.ndarray, context: int, params: ModelParams) -> float:
    """Exact softmax probability of one context course given a projection."""
    scores = params.output_matrix @ a
    scores -= scores.max()
    exps = np.exp(scores)
    return float(exps[context] / exps.sum())


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _softplus(x: float) -> float:
    # log(1 + e^x) without overflow; equals -log(sigmoid(-x))
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


@dataclass
class GradientUpdate:
    """Sparse gradients keyed by matrix row, summed over a batch of pairs."""

    input: dict[int, np.ndarray] = field(default_factory=dict)
    output: dict[int, np.ndarray] = field(default_factory=dict)
    factors: dict[str, dict[int, np.ndarray]] = field(default_factory=dict)

    def _bump(self, table: dict[int, np.ndarray], row: int, grad: np.ndarray) -> None:
        if row in table:
            table[row] += grad
        else:
            table[row] = grad.copy()

    def add_input(self, row: int, grad: np.ndarray) -> None:
        self._bump(self.input, row, grad)

    def add_output(self, row: int, grad: np.ndarray) -> None:
        self._bump(self.output, row, grad)

    def add_factor(self, name: str, row: int, grad: np.ndarray) -> None:
        self._bump(self.factors.setdefault(name, {}), row, grad)


def loss_and_gradient(
    pairs: Sequence[tuple[int, int]],
    params: ModelParams,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
    fixed_negatives: Sequence[Sequence[int]] | None = None,
) -> tuple[float, GradientUpdate]:
    """Total loss and summed gradients for a batch of pairs at fixed params.

    With negative sampling the noise draws come from rng (seeded from the
    config when omitted) unless fixed_negatives pins one list per pair,
    which makes the loss a deterministic function of the parameters.  This
    batch API has no corpus statistics, so its own draws are uniform over
    the vocabulary; train() samples from the unigram^0.75 distribution.
    """
    config.validate()
    grads = GradientUpdate()
    total = 0.0
    sampler: Callable[[], np.ndarray] | None = None
    if config.mode == MODE_NEGATIVE_SAMPLING and fixed_negatives is None:
        if rng is None:
            rng = np.random.default_rng(config.seed)
        counts = np.ones(params.n_courses)
        cum = _noise_cumulative(counts)
        sampler = lambda: np.searchsorted(cum, rng.random(config.negatives))

    for idx, (center, context) in enumerate(pairs):
        frows = params.rows_for(center)
        a = compose_input(center, frows, params)
        if config.mode == MODE_FULL_SOFTMAX:
            loss, grad_a = _softmax_pair(a, context, params, grads)
        else:
            if fixed_negatives is not None:
                negs = np.asarray(fixed_negatives[idx], dtype=np.intp)
            else:
                negs = sampler()
            loss, grad_a = _negative_pair(a, context, negs, params, grads)
        total += loss
        grads.add_input(center, grad_a)
        for name, rows in frows.items():
            for r in rows:
                grads.add_factor(name, int(r), grad_a)
    if not math.isfinite(total):
        raise DataError("training loss diverged to a non-finite value")
    return total, grads


def _softmax_pair(
    a: np.ndarray, context: int, params: ModelParams, grads: GradientUpdate
) -> tuple[float, np.ndarray]:
    out = params.output_matrix
    scores = out @ a
    m = scores.max()
    exps = np.exp(scores - m)
    z = exps.sum()
    loss = -(scores[context] - m - math.log(z))
    probs = exps / z
    grad_a = out.T @ probs - out[context]
    for k in range(out.shape[0]):
        coeff = probs[k] - (1.0 if k == context else 0.0)
        grads.add_output(k, coeff * a)
    return float(loss), grad_a


def _negative_pair(
    a: np.ndarray,
    context: int,
    negatives: np.ndarray,
    params: ModelParams,
    grads: GradientUpdate,
) -> tuple[float, np.ndarray]:
    out = params.output_matrix
    s_pos = float(out[context] @ a)
    loss = _softplus(-s_pos)
    g_pos = _sigmoid(s_pos) - 1.0
    grad_a = g_pos * out[context]
    grads.add_output(context, g_pos * a)
    for n in negatives:
        n = int(n)
        if n == context:
            continue
        s = float(out[n] @ a)
        loss += _softplus(s)
        g = _sigmoid(s)
        grad_a = grad_a + g * out[n]
        grads.add_output(n, g * a)
    return loss, grad_a


def _noise_cumulative(counts: np.ndarray) -> np.ndarray:
    """Cumulative unigram^0.75 noise distribution for inverse-CDF sampling."""
    weights = np.asarray(counts, dtype=np.float64) ** 0.75
    total = weights.sum()
    if total <= 0.0:
        raise DataError("noise distribution has no mass")
    return np.cumsum(weights / total)


def _factor_values(course, name: str) -> list[str]:
    if name == FACTOR_INSTRUCTOR:
        return sorted(course.instructors)
    if name == FACTOR_DEPARTMENT:
        return [course.department]
    raise DataError(f"unknown factor {name!r}")


def _init_params(corpus: EnrollmentCorpus, config: TrainConfig, rng) -> ModelParams:
    vocab = sorted({r.course_id for r in corpus.records})
    n, dim = len(vocab), config.dim
    input_matrix = (rng.random((n, dim)) - 0.5) / dim
    output_matrix = np.zeros((n, dim))
    factors = config.canonical_factors()
    factor_vocabs: dict[str, list[str]] = {}
    factor_matrices: dict[str, np.ndarray] = {}
    factor_rows: dict[str, list[np.ndarray]] = {}
    for name in factors:
        values = sorted({v for cid in vocab for v in _factor_values(corpus.catalog[cid], name)})
        index = {v: i for i, v in enumerate(values)}
        factor_vocabs[name] = values
        factor_matrices[name] = np.zeros((len(values), dim))
        factor_rows[name] = [
            np.array([index[v] for v in _factor_values(corpus.catalog[cid], name)], dtype=np.intp)
            for cid in vocab
        ]
    return ModelParams(
        vocab=vocab,
        input_matrix=input_matrix,
        output_matrix=output_matrix,
        factor_names=factors,
        factor_vocabs=factor_vocabs,
        factor_matrices=factor_matrices,
        factor_rows=factor_rows,
    )


def train(
    corpus: EnrollmentCorpus, config: TrainConfig
) -> tuple[ModelParams, TrainingReport]:
    """Train embeddings on serialized enrollment sequences.

    Deterministic for a given (corpus, config) when threads == 1.  With more
    threads the pair stream is sharded and updates race in word2vec fashion,
    trading bit-reproducibility for wall-clock speed.
    """
    config.validate()
    if not corpus.records:
        raise EmptyCorpusError("cannot train on an empty corpus")
    sequences = serialize_sequences(corpus, config.seed)
    rng = np.random.default_rng(config.seed)
    params = _init_params(corpus, config, rng)
    row = {cid: i for i, cid in enumerate(params.vocab)}

    pair_list: list[tuple[int, int]] = []
    for seq in sequences:
        tokens = [row[cid] for cid in seq.course_ids]
        pair_list.extend(generate_training_pairs(tokens, config.window))
    if not pair_list:
        raise DataError(
            "no training pairs; every sequence is shorter than the context window"
        )
    centers = np.array([p[0] for p in pair_list], dtype=np.intp)
    contexts = np.array([p[1] for p in pair_list], dtype=np.intp)

    counts = np.zeros(len(params.vocab))
    for r in corpus.records:
        counts[row[r.course_id]] += 1
    noise_cum = _noise_cumulative(counts)

    report = TrainingReport(
        mode=config.mode,
        n_sequences=len(sequences),
        n_pairs_per_epoch=len(pair_list),
        vocab_size=len(params.vocab),
    )
    n_pairs = len(pair_list)
    total_steps = n_pairs * config.epochs
    progress = [0]

    for epoch in range(config.epochs):
        if config.mode == MODE_NEGATIVE_SAMPLING:
            draws = rng.random((n_pairs, config.negatives))
            neg_block = np.searchsorted(noise_cum, draws)
        else:
            neg_block = None
        if config.threads == 1:
            epoch_loss = _run_span(
                params, config, centers, contexts, neg_block,
                range(n_pairs), total_steps, progress,
            )
        else:
            spans = np.array_split(np.arange(n_pairs), config.threads)
            losses = [0.0] * len(spans)

            def work(i: int, span: np.ndarray) -> None:
                losses[i] = _run_span(
                    params, config, centers, contexts, neg_block,
                    span, total_steps, progress,
                )

            workers = [
                threading.Thread(target=work, args=(i, span))
                for i, span in enumerate(spans)
            ]
            for w in workers:
                w.start()
            for w in workers:
                w.join()
            epoch_loss = sum(losses)
        report.epoch_mean_loss.append(epoch_loss / n_pairs)
    return params, report


def _run_span(
    params: ModelParams,
    config: TrainConfig,
    centers: np.ndarray,
    contexts: np.ndarray,
    neg_block: np.ndarray | None,
    span: Iterable[int],
    total_steps: int,
    progress: list[int],
) -> float:
    """SGD over one slice of the pair stream; returns its summed loss."""
    w_in = params.input_matrix
    w_out = params.output_matrix
    factor_names = params.factor_names
    factor_rows = params.factor_rows
    factor_mats = params.factor_matrices
    lr_hi, lr_lo = config.initial_lr, config.min_lr
    span_loss = 0.0

    for i in span:
        step = progress[0]
        progress[0] = step + 1
        lr = max(lr_lo, lr_hi - (lr_hi - lr_lo) * (step / total_steps))
        c = int(centers[i])
        o = int(contexts[i])
        active = [(name, factor_rows[name][c]) for name in factor_names]
        if active:
            a = w_in[c].copy()
            for name, rows in active:
                for r in rows:
                    a += factor_mats[name][r]
        else:
            a = w_in[c]

        if neg_block is None:
            scores = w_out @ a
            m = scores.max()
            exps = np.exp(scores - m)
            z = exps.sum()
            span_loss += -(scores[o] - m - math.log(z))
            probs = exps / z
            grad_a = w_out.T @ probs - w_out[o]
            w_out -= np.outer(lr * probs, a)
            w_out[o] += lr * a
        else:
            v_pos = w_out[o].copy()
            s_pos = float(v_pos @ a)
            span_loss += _softplus(-s_pos)
            g_pos = _sigmoid(s_pos) - 1.0
            grad_a = g_pos * v_pos
            negs = [int(n) for n in neg_block[i] if n != o]
            neg_vs = [w_out[n].copy() for n in negs]
            for n, v_n in zip(negs, neg_vs):
                s = float(v_n @ a)
                span_loss += _softplus(s)
                g = _sigmoid(s)
                grad_a += g * v_n
                w_out[n] -= (lr * g) * a
            w_out[o] -= (lr * g_pos) * a

        step_vec = lr * grad_a
        w_in[c] -= step_vec
        for name, rows in active:
            mat = factor_mats[name]
            for r in rows:
                mat[r] -= step_vec
    return span_loss


def extract_embeddings(params: ModelParams, variant: str = VARIANT_INPUT):
    """Course vectors as a dense embedding set.

    'input' takes course rows of the input matrix alone (attribute rows are
    not folded in, so vectors describe the course net of who taught it);
    'input_plus_out' concatenates each input row with its output row, giving
    vectors of twice the training dimension.
    """
    from .vectorspace import DenseEmbeddingSet

    if variant == VARIANT_INPUT:
        matrix = params.input_matrix.astype(np.float64).copy()
    elif variant == VARIANT_INPUT_PLUS_OUT:
        matrix = np.concatenate(
            [params.input_matrix, params.output_matrix], axis=1
        ).astype(np.float64)
    else:
        raise DataError(f"unknown embedding variant {variant!r}")
    label = model_label(params.factor_names, variant)
    return DenseEmbeddingSet(list(params.vocab), matrix, provenance=label)


def _write_matrix(path: Path, matrix: np.ndarray) -> None:
    data = np.ascontiguousarray(matrix, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", data.shape[0], data.shape[1]))
        fh.write(data.tobytes())


def _read_matrix(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < 8:
        raise DataError(f"matrix file {path} is truncated")
    n, d = struct.unpack("<II", raw[:8])
    expected = 8 + 4 * n * d
    if len(raw) != expected:
        raise DataError(f"matrix file {path} has {len(raw)} bytes, expected {expected}")
    flat = np.frombuffer(raw, dtype="<f4", offset=8)
    return flat.reshape(n, d).astype(np.float64)


def _write_lines(path: Path, lines: Iterable[str]) -> None:
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def _read_lines(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    return text.splitlines()


def save_checkpoint(
    directory: str | Path,
    params: ModelParams,
    config: TrainConfig,
    report: TrainingReport | None = None,
) -> None:
    """Write params to a directory that load_checkpoint restores exactly.

    Matrices are stored as float32 rows behind an (n_rows, n_cols) uint32
    little-endian header; everything else is UTF-8 text.  Byte content is a
    pure function of the arguments.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_lines(directory / "vocab.txt", params.vocab)
    _write_matrix(directory / "input.mat", params.input_matrix)
    _write_matrix(directory / "output.mat", params.output_matrix)
    assignments: dict[str, dict[str, list[str]]] = {}
    for name in params.factor_names:
        values = params.factor_vocabs[name]
        _write_lines(directory / f"factor_{name}.vocab.txt", values)
        _write_matrix(directory / f"factor_{name}.mat", params.factor_matrices[name])
        assignments[name] = {
            cid: [values[r] for r in params.factor_rows[name][i]]
            for i, cid in enumerate(params.vocab)
        }
    metadata = {
        "format": _CHECKPOINT_FORMAT,
        "dim": params.dim,
        "n_courses": params.n_courses,
        "factors": list(params.factor_names),
        "factor_assignments": assignments,
        "config": {
            "dim": config.dim,
            "window": config.window,
            "epochs": config.epochs,
            "initial_lr": config.initial_lr,
            "min_lr": config.min_lr,
            "mode": config.mode,
            "negatives": config.negatives,
            "factors": list(config.factors),
            "seed": config.seed,
            "threads": config.threads,
        },
    }
    if report is not None:
        metadata["report"] = report.to_dict()
    (directory / "metadata.json").write_text(
        json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_checkpoint(directory: str | Path) -> tuple[ModelParams, TrainConfig]:
    """Restore a checkpoint written by save_checkpoint."""
    directory = Path(directory)
    meta_path = directory / "metadata.json"
    if not meta_path.is_file():
        raise DataError(f"{directory} is not a checkpoint: missing metadata.json")
    metadata = json.loads(meta_path.read_text(encoding="utf-8"))
    if metadata.get("format") != _CHECKPOINT_FORMAT:
        raise DataError(f"unrecognized checkpoint format {metadata.get('format')!r}")
    vocab = _read_lines(directory / "vocab.txt")
    input_matrix = _read_matrix(directory / "input.mat")
    output_matrix = _read_matrix(directory / "output.mat")
    factors = tuple(metadata["factors"])
    factor_vocabs: dict[str, list[str]] = {}
    factor_matrices: dict[str, np.ndarray] = {}
    factor_rows: dict[str, list[np.ndarray]] = {}
    for name in factors:
        values = _read_lines(directory / f"factor_{name}.vocab.txt")
        index = {v: i for i, v in enumerate(values)}
        factor_vocabs[name] = values
        factor_matrices[name] = _read_matrix(directory / f"factor_{name}.mat")
        assigned = metadata["factor_assignments"][name]
        factor_rows[name] = [
            np.array([index[v] for v in assigned[cid]], dtype=np.intp) for cid in vocab
        ]
    params = ModelParams(
        vocab=vocab,
        input_matrix=input_matrix,
        output_matrix=output_matrix,
        factor_names=factors,
        factor_vocabs=factor_vocabs,
        factor_matrices=factor_matrices,
        factor_rows=factor_rows,
    )
    cfg = metadata["config"]
    config = TrainConfig(
        dim=cfg["dim"],
        window=cfg["window"],
        epochs=cfg["epochs"],
        initial_lr=cfg["initial_lr"],
        min_lr=cfg["min_lr"],
        mode=cfg["mode"],
        negatives=cfg["negatives"],
        factors=tuple(cfg["factors"]),
        seed=cfg["seed"],
        threads=cfg["threads"],
    )
    return params, config
