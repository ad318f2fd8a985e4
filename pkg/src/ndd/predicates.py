"""Per-word edit scoring for predicate-likelihood ranking.

Each word receives the disturbance score of a single-word edit (deletion,
mask substitution, or substitution by a fixed word). Verbs anchor the local
predictions of their arguments, so editing them disturbs neighbors most.
Mode scores combine by multiplying within-sentence softmax probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .backends.base import MlmBackend
from .core import EditOperation, Sentence, WeightConfig, ndd
from .errors import UnsupportedOperationError
from .scoring import apply_edit, neighbor_profiles, pseudo_perplexity

ENSEMBLE = "ensemble"

# Replacement-word defaults by evaluation domain; any vocabulary word works.
REPLACEMENT_DEFAULTS = {"english-in-domain": "a", "english-out-of-domain": "that", "spanish": "el"}


class EditKindForWord(Enum):
    DELETE = "delete"
    REPLACE_BY_MASK = "mask"
    REPLACE_BY_WORD = "word"


@dataclass(frozen=True)
class EditionMode:
    """How each word is perturbed when scoring it."""

    kind: EditKindForWord
    replacement_word: str = ""

    def __post_init__(self):
        needs_word = self.kind is EditKindForWord.REPLACE_BY_WORD
        if needs_word != bool(self.replacement_word):
            raise ValueError("replacement_word is required exactly for word replacement")

    def label(self) -> str:
        if self.kind is EditKindForWord.REPLACE_BY_WORD:
            return f"word:{self.replacement_word}"
        return self.kind.value

    def edit_at(self, position: int, mask_token: str) -> EditOperation:
        if self.kind is EditKindForWord.DELETE:
            return EditOperation.deletion(position, position)
        if self.kind is EditKindForWord.REPLACE_BY_MASK:
            return EditOperation.replace(position, position, (mask_token,))
        return EditOperation.replace(position, position, (self.replacement_word,))


@dataclass(frozen=True)
class WordRanking:
    """One score per word; higher marks a more predicate-like word."""

    sentence: Sentence
    scores: tuple[float, ...]
    mode: EditionMode | str

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if len(self.scores) != len(self.sentence):
            raise ValueError("need exactly one score per word")
        if not all(np.isfinite(self.scores)):
            raise ValueError("scores must be finite")

    def mode_label(self) -> str:
        return self.mode if isinstance(self.mode, str) else self.mode.label()


def word_edit_scores(
    sentence: Sentence,
    backend: MlmBackend,
    mode: EditionMode,
    weight_config: WeightConfig | None = None,
) -> WordRanking:
    """Disturbance score of the mode's single-word edit at every position.

    Uses plain distance weighting (mu from the config); the compression
    specific balanced and positional weights do not apply here.
    """
    if len(sentence) < 2:
        raise ValueError("ranking needs a sentence of at least 2 words")
    mu = weight_config.mu if weight_config is not None else 0.9
    mask_token = backend.vocab.mask_token
    plain = WeightConfig(mu=mu, nu=1.0, balanced=False, positional=False)
    scores = []
    for position in range(1, len(sentence) + 1):
        edit = mode.edit_at(position, mask_token)
        profiles = neighbor_profiles(backend, sentence, edit)
        w = plain.weights_for_span(len(sentence), position, position)
        scores.append(ndd(profiles.before, profiles.after, w, profiles.positions).score)
    return WordRanking(sentence, tuple(scores), mode)


def _softmax(scores: Sequence[float]) -> np.ndarray:
    x = np.asarray(scores, dtype=np.float64)
    e = np.exp(x - x.max())
    return e / e.sum()


def ensemble_scores(rankings: Sequence[WordRanking]) -> WordRanking:
    """Product of within-sentence softmax probabilities across three modes.

    The softmax turns each mode's raw scores into a distribution over the
    sentence's words, so modes on different scales combine on equal terms;
    the product rewards words every mode ranks highly.
    """
    if len(rankings) != 3:
        raise ValueError(f"ensemble needs exactly 3 rankings, got {len(rankings)}")
    sentence = rankings[0].sentence
    if any(r.sentence != sentence for r in rankings):
        raise ValueError("rankings must score the same sentence")
    labels = {r.mode_label() for r in rankings}
    if len(labels) != 3:
        raise ValueError(f"rankings must come from three distinct modes, got {sorted(labels)}")
    product = np.ones(len(sentence), dtype=np.float64)
    for ranking in rankings:
        product *= _softmax(ranking.scores)
    return WordRanking(sentence, tuple(float(p) for p in product), ENSEMBLE)


def ppl_word_scores(
    sentence: Sentence,
    backend: MlmBackend,
    mode: EditionMode,
    relative: bool = False,
) -> WordRanking:
    """Fluency-based competitor: score = pseudo-perplexity after the edit.

    With relative=True the unedited sentence's pseudo-perplexity is
    subtracted, ranking by the change rather than the absolute level.
    Word replacement is not a fluency probe, so only deletion and mask
    substitution are accepted.
    """
    if mode.kind is EditKindForWord.REPLACE_BY_WORD:
        raise UnsupportedOperationError("perplexity ranking supports delete and mask modes only")
    if len(sentence) < 2:
        raise ValueError("ranking needs a sentence of at least 2 words")
    mask_token = backend.vocab.mask_token
    base = pseudo_perplexity(backend, sentence) if relative else 0.0
    scores = []
    for position in range(1, len(sentence) + 1):
        edited = apply_edit(sentence, mode.edit_at(position, mask_token))
        scores.append(pseudo_perplexity(backend, edited) - base)
    return WordRanking(sentence, tuple(scores), mode)
