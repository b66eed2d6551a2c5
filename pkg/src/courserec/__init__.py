"""Course representation engine: skip-gram embeddings over enrollment
sequences, bag-of-words description vectors, hybrid concatenations, rank
evaluation, diversified recommendations, and an HTTP service."""

from .bow import (
    SparseVector,
    TermIndex,
    build_term_index,
    sparse_cosine,
    to_embedding_set,
    vectorize,
    vectorize_catalog,
)
from .corpus import (
    Course,
    EnrollmentCorpus,
    EnrollmentRecord,
    IngestReport,
    Semester,
    SerializedSequence,
    SyntheticGroundTruth,
    Term,
    filter_min_enrollment,
    ingest_enrollments,
    load_catalog,
    load_corpus,
    serialize_sequences,
)
from .course2vec import (
    ModelParams,
    TrainConfig,
    TrainingReport,
    compose_input,
    extract_embeddings,
    generate_training_pairs,
    load_checkpoint,
    loss_and_gradient,
    model_label,
    save_checkpoint,
    softmax_prob,
    train,
)
from .errors import (
    CourseRecError,
    DataError,
    EmbeddingFormatError,
    EmptyCorpusError,
    InfeasibleSpecError,
    UnknownCourseError,
    ZeroVectorError,
)
from .evaluation import (
    AnalogyReport,
    EquivalencyReport,
    analogy_table,
    equivalency_table,
    eval_analogy,
    eval_equivalency,
)
from .recommender import (
    ExploreView,
    Recommendation,
    RecommendationList,
    build_explore_view,
    recommend_diversified,
    recommend_plain,
)
from .synthetic import SynthSpec, generate_synthetic_corpus
from .textprep import porter_stem, preprocess_description
from .vectorspace import (
    DenseEmbeddingSet,
    DropReport,
    RankedEntry,
    RankedList,
    analogy_query,
    concat_sets,
    cosine,
    l2_normalize,
    load_embeddings,
    nearest_neighbors,
    rank_by_cosine,
    save_embeddings,
)

__version__ = "0.1.0"
