"""Edit scoring: masked neighbor distributions before and after an edit.

The pipeline for one edit is: apply the edit, tokenize both sentences, mask
each neighbor word (the whole subword span becomes a single mask token),
query the backend at the masked slot, and aggregate per-neighbor divergences
with the configured weights. Neighbor words are identical on both sides by
construction; only their positions shift by the edit's length change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .backends.base import MlmBackend
from .core import (
    DivergenceProfile,
    EditOperation,
    Sentence,
    VocabDistribution,
    WeightConfig,
    ndd,
    neighbor_positions,
)
from .errors import UnsupportedOperationError
from .tokenizer import TokenizedSentence, tokenize


def apply_edit(sentence: Sentence, edit: EditOperation) -> Sentence:
    """Return the edited sentence; deleting every word is an error."""
    edit.validate_for(sentence)
    words = sentence.words[: edit.start - 1] + edit.replacement + sentence.words[edit.end :]
    if not words:
        raise ValueError("edit removes the whole sentence")
    return Sentence(words, sentence.language_tag)


def masked_ids(tokenized: TokenizedSentence, word_index: int) -> tuple[list[int], int]:
    """Token ids with word `word_index` (1-based) collapsed to one mask token.

    Returns (ids, mask_position). Multi-piece words contribute a single mask,
    so the backend predicts one distribution for the whole word slot.
    """
    lo, hi = tokenized.span_of_word(word_index)
    ids = list(tokenized.token_ids[:lo]) + [tokenized.vocab.mask_id] + list(tokenized.token_ids[hi:])
    return ids, lo


def masked_distribution(
    backend: MlmBackend, tokenized: TokenizedSentence, word_index: int
) -> VocabDistribution:
    ids, pos = masked_ids(tokenized, word_index)
    return VocabDistribution.from_weights(backend.predict_masked(ids, pos), backend.vocab.vocab_id)


def batch_masked_distributions(
    backend: MlmBackend, queries: Sequence[tuple[TokenizedSentence, int]]
) -> list[VocabDistribution]:
    """Masked distributions for many (sentence, word) slots in one backend call."""
    prepared = [masked_ids(tok, word_index) for tok, word_index in queries]
    raw = backend.predict_masked_batch(prepared)
    vocab_id = backend.vocab.vocab_id
    return [VocabDistribution.from_weights(w, vocab_id) for w in raw]


@dataclass(frozen=True)
class NeighborProfiles:
    """Aligned per-neighbor distributions for one edit."""

    positions: tuple[int, ...]  # 1-based positions in the original sentence
    before: tuple[VocabDistribution, ...]
    after: tuple[VocabDistribution, ...]


def neighbor_profiles(
    backend: MlmBackend, sentence: Sentence, edit: EditOperation
) -> NeighborProfiles:
    """Distributions at every neighbor slot, in the original and edited sentence.

    Neighbor word k of the original maps to k below the span and to
    k + (replacement length - span length) above it.
    """
    edited = apply_edit(sentence, edit)
    vocab = backend.vocab
    tok_before = tokenize(sentence, vocab, backend.max_len)
    tok_after = tokenize(edited, vocab, backend.max_len)

    n = len(sentence)
    i, j = edit.start, edit.end
    offset = len(edit.replacement) - edit.span_length()
    positions = neighbor_positions(n, i, j)
    mapped = [k if k < i else k + offset for k in positions]
    for k, k_after in zip(positions, mapped):
        if sentence.words[k - 1] != edited.words[k_after - 1]:
            raise AssertionError("neighbor words must be unchanged by the edit")

    queries = [(tok_before, k) for k in positions] + [(tok_after, k) for k in mapped]
    dists = batch_masked_distributions(backend, queries)
    m = len(positions)
    return NeighborProfiles(tuple(positions), tuple(dists[:m]), tuple(dists[m:]))


def score_edit(
    backend: MlmBackend,
    sentence: Sentence,
    edit: EditOperation,
    weights: WeightConfig | None = None,
) -> DivergenceProfile:
    """Disturbance score of one edit: weighted sum of neighbor divergences."""
    if weights is None:
        weights = WeightConfig()
    profiles = neighbor_profiles(backend, sentence, edit)
    w = weights.weights_for_span(len(sentence), edit.start, edit.end)
    return ndd(profiles.before, profiles.after, w, profiles.positions)


def pseudo_perplexity(backend: MlmBackend, sentence: Sentence | TokenizedSentence) -> float:
    """Leave-one-out masked perplexity over the non-special tokens.

    exp(-(1/m) sum over inner tokens of ln p(token | rest)); lower is more
    fluent under the backend. A uniform predictor over c tokens scores c.
    """
    tok = sentence if isinstance(sentence, TokenizedSentence) else tokenize(
        sentence, backend.vocab, backend.max_len
    )
    ids = list(tok.token_ids)
    inner = range(1, len(ids) - 1)
    queries = []
    for pos in inner:
        masked = ids.copy()
        masked[pos] = tok.vocab.mask_id
        queries.append((masked, pos))
    raw = backend.predict_masked_batch(queries)
    vocab_id = backend.vocab.vocab_id
    total = 0.0
    for pos, weights_vec in zip(inner, raw):
        dist = VocabDistribution.from_weights(weights_vec, vocab_id)
        total += float(np.log(dist.probabilities[ids[pos]]))
    m = len(queries)
    if m == 0:
        raise ValueError("sentence has no maskable tokens")
    return float(np.exp(-total / m))


def sentence_embedding(backend: MlmBackend, sentence: Sentence | TokenizedSentence) -> np.ndarray:
    """Mean hidden state over non-special tokens."""
    if not backend.supports_embeddings:
        raise UnsupportedOperationError(f"backend {backend.name} exposes no hidden states")
    tok = sentence if isinstance(sentence, TokenizedSentence) else tokenize(
        sentence, backend.vocab, backend.max_len
    )
    states = np.asarray(backend.hidden_states(list(tok.token_ids)), dtype=np.float64)
    if states.ndim != 2 or states.shape[0] != len(tok.token_ids):
        raise ValueError(f"hidden states have shape {states.shape}, expected ({len(tok.token_ids)}, dim)")
    return states[1:-1].mean(axis=0)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


@dataclass(frozen=True)
class EditReport:
    """Everything the CLI prints about one scored edit."""

    sentence: Sentence
    edited: Sentence
    edit: EditOperation
    profile: DivergenceProfile
    ppl_before: float
    ppl_after: float
    embedding_cosine: float | None

    @property
    def score(self) -> float:
        return self.profile.score


def report_edit(
    backend: MlmBackend,
    sentence: Sentence,
    edit: EditOperation,
    weights: WeightConfig | None = None,
) -> EditReport:
    """Score an edit and attach fluency and embedding-shift baselines."""
    profile = score_edit(backend, sentence, edit, weights)
    edited = apply_edit(sentence, edit)
    ppl_before = pseudo_perplexity(backend, sentence)
    ppl_after = pseudo_perplexity(backend, edited)
    cosine = None
    if backend.supports_embeddings:
        cosine = cosine_similarity(
            sentence_embedding(backend, sentence), sentence_embedding(backend, edited)
        )
    return EditReport(sentence, edited, edit, profile, ppl_before, ppl_after, cosine)
