"""Edit-disturbance scoring for sentences, with compression, treebank
pruning, and predicate detection built on top.

The core idea: mask each word that survives an edit, in both the original
and the edited sentence, and sum the weighted KL divergences between the
two predicted distributions at every such slot. Small scores mean the edit
left the rest of the sentence's predictive context intact.
"""

from .backends import (
    MlmBackend,
    NgramOracle,
    OnnxBackend,
    UniformOracle,
    check_parity,
    load_bundle,
    verify_parity,
)
from .baselines import BaselineKind, cosine_score, ppl_compress
from .compress import (
    CompressionConfig,
    CompressionTrace,
    IterationRecord,
    SpanCandidate,
    compress,
    compress_once,
    random_compress,
    select_non_overlapping,
    span_search,
)
from .core import (
    DivergenceProfile,
    EditKind,
    EditOperation,
    Sentence,
    VocabDistribution,
    WeightConfig,
    balanced_distance_weights,
    distance_weights,
    kl_divergence,
    ndd,
    neighbor_positions,
    position_weights,
)
from .datasets import (
    CompressionPair,
    DependencyTree,
    SrlSentence,
    load_compression_jsonl,
    load_conll2009,
    load_conllu,
)
from .errors import (
    BackendError,
    ConfigError,
    DataError,
    DegenerateCorpusError,
    DimensionMismatchError,
    NddError,
    SequenceTooLongError,
    UnsupportedOperationError,
    VocabMismatchError,
)
from .harness import run_compression_eval, run_predicate_eval, run_pruning_eval
from .metrics import (
    average_precision,
    corpus_bleu,
    depth_distribution,
    mean_average_precision,
    roc_auc,
    sentence_bleu,
    subtree_proportion,
    token_f1,
)
from .predicates import (
    EditionMode,
    EditKindForWord,
    WordRanking,
    ensemble_scores,
    ppl_word_scores,
    word_edit_scores,
)
from .reports import EvalReport, file_fingerprint
from .scoring import (
    apply_edit,
    cosine_similarity,
    masked_distribution,
    neighbor_profiles,
    pseudo_perplexity,
    report_edit,
    score_edit,
    sentence_embedding,
)
from .tokenizer import TokenizedSentence, tokenize
from .vocab import Vocabulary

__version__ = "0.1.0"

__all__ = [
    "MlmBackend", "NgramOracle", "OnnxBackend", "UniformOracle",
    "check_parity", "load_bundle", "verify_parity",
    "BaselineKind", "cosine_score", "ppl_compress",
    "CompressionConfig", "CompressionTrace", "IterationRecord", "SpanCandidate",
    "compress", "compress_once", "random_compress", "select_non_overlapping", "span_search",
    "DivergenceProfile", "EditKind", "EditOperation", "Sentence",
    "VocabDistribution", "WeightConfig",
    "balanced_distance_weights", "distance_weights", "kl_divergence", "ndd",
    "neighbor_positions", "position_weights",
    "CompressionPair", "DependencyTree", "SrlSentence",
    "load_compression_jsonl", "load_conll2009", "load_conllu",
    "BackendError", "ConfigError", "DataError", "DegenerateCorpusError",
    "DimensionMismatchError", "NddError", "SequenceTooLongError",
    "UnsupportedOperationError", "VocabMismatchError",
    "run_compression_eval", "run_predicate_eval", "run_pruning_eval",
    "average_precision", "corpus_bleu", "depth_distribution", "mean_average_precision",
    "roc_auc", "sentence_bleu", "subtree_proportion", "token_f1",
    "EditionMode", "EditKindForWord", "WordRanking",
    "ensemble_scores", "ppl_word_scores", "word_edit_scores",
    "EvalReport", "file_fingerprint",
    "apply_edit", "cosine_similarity", "masked_distribution", "neighbor_profiles",
    "pseudo_perplexity", "report_edit", "score_edit", "sentence_embedding",
    "TokenizedSentence", "tokenize",
    "Vocabulary",
    "__version__",
]
