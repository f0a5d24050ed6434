"""Meme similarity grouping and emotion analytics engine."""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    ATTRIBUTES,
    AttributeLabels,
    Corpus,
    DistributionTable,
    MemeRecord,
    attribute_distribution,
    load_corpus,
    save_corpus,
)
from .embeddings import (  # noqa: F401
    AlignedStore,
    EmbeddingManifest,
    EmbeddingMatrix,
    align,
    l2_normalize,
    read_embeddings,
    read_embeddings_jsonl,
    write_embeddings,
)
from .similarity import (  # noqa: F401
    AggregationMode,
    ModalityScores,
    SimilarityEdge,
    aggregate,
    contrastive_loss,
    cosine,
    pair_scores,
    pairwise_edges,
)
from .grouping import (  # noqa: F401
    DisjointSet,
    GroupReport,
    MemeGroup,
    group_edges,
    group_stats,
)
from .emotion import (  # noqa: F401
    EMOTIONS,
    EmotionAnnotations,
    EmotionScores,
    annotate,
    classify_lexicon,
    emotion_distribution,
    group_emotions,
    load_emotion_sidecar,
)
from .analytics import (  # noqa: F401
    ChiSquareResult,
    ContingencyTable,
    chi_square,
    crosstab,
    word_frequencies,
)
from .evaluation import (  # noqa: F401
    AgreementReport,
    ResponseStore,
    SurveyResponse,
    agreement_rate,
    agreement_report,
    average_agreement,
    emotion_agreement,
    load_responses,
)
