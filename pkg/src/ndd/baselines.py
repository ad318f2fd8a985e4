"""Competitor scorers: perplexity-driven compression and embedding cosine.

The perplexity compressor plugs a fluency scorer into the exact search and
selection scaffold the divergence compressor uses, so the two differ only
in what a candidate deletion costs and what the threshold means.
"""

from __future__ import annotations

from enum import Enum

from .backends.base import MlmBackend
from .compress import CompressionConfig, CompressionTrace, compress_with
from .core import EditOperation, Sentence
from .scoring import apply_edit, cosine_similarity, pseudo_perplexity, sentence_embedding

# Relative fluency ceiling: a deletion is acceptable when the result stays
# within this factor of the current sentence's pseudo-perplexity.
PPL_CEILING_FACTOR = 1.25


class BaselineKind(Enum):
    PPL_COMPRESS = "ppl-compress"
    PPL_PREDICATE = "ppl-predicate"
    COSINE_SCORE = "cosine-score"
    RANDOM_COMPRESS = "random-compress"


def ppl_compress(
    sentence: Sentence,
    backend: MlmBackend,
    config: CompressionConfig,
    ppl_max: float | None = None,
) -> CompressionTrace:
    """Iterated deletion keeping candidates whose result stays fluent.

    Candidate score = pseudo-perplexity of the sentence after the deletion;
    threshold = ppl_max, or 1.25x the current sentence's pseudo-perplexity
    when no absolute ceiling is given (re-evaluated each iteration).
    """

    def scorer(sent: Sentence, start: int, end: int):
        edited = apply_edit(sent, EditOperation.deletion(start, end))
        return pseudo_perplexity(backend, edited), None

    def threshold_for(sent: Sentence) -> float:
        if ppl_max is not None:
            return ppl_max
        return PPL_CEILING_FACTOR * pseudo_perplexity(backend, sent)

    return compress_with(
        sentence, config.l_max, threshold_for, scorer, config.max_iterations, config.overlap_keep
    )


def cosine_score(before: Sentence, after: Sentence, backend: MlmBackend) -> float:
    """Cosine similarity of mean-pooled sentence embeddings."""
    return cosine_similarity(
        sentence_embedding(backend, before), sentence_embedding(backend, after)
    )
