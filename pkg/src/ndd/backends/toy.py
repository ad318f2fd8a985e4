"""Deterministic toy backends: an interpolated n-gram oracle and a uniform one.

Both are exact and dependency-free so every score in the test suite can be
recomputed by hand. The n-gram oracle conditions on the two tokens adjacent
to the masked slot, which makes masked predictions sensitive to exactly the
local context the divergence metric inspects.
"""

from __future__ import annotations

from collections import Counter, defaultdict

import numpy as np

from ..core import Sentence
from ..vocab import Vocabulary
from .base import MlmBackend
from .embedded_corpus import embedded_corpus, embedded_vocabulary

_EMBED_SEED = 12345
_EMBED_DIM = 32

# interpolation weights: trigram, left bigram, right bigram, unigram
_LAMBDA = (0.85, 0.05, 0.05, 0.05)


class NgramOracle(MlmBackend):
    """Order-2 interpolated n-gram model with add-one smoothing.

    p(w | L, R) = 0.85 p3(w | L, R) + 0.05 p2(w | L) + 0.05 p2(w | R) + 0.05 p1(w)
    where every component is add-one smoothed over the vocabulary size. The
    trigram component dominates so that a context attested in training stays
    sharply peaked even when one of its flanking tokens is independently
    frequent elsewhere in the corpus.

    Each training sentence contributes count_weight observations per event;
    with a few hundred sentences against a ~500-token vocabulary, raw counts
    of 1-3 would drown in the add-one prior and every context would look
    nearly uniform, hiding exactly the contrasts the divergence measures.
    """

    def __init__(
        self,
        corpus: tuple[tuple[str, ...], ...] | None = None,
        vocab: Vocabulary | None = None,
        max_len: int = 128,
        count_weight: int = 1000,
    ) -> None:
        if count_weight < 1:
            raise ValueError(f"count_weight must be >= 1, got {count_weight}")
        self._vocab = vocab if vocab is not None else embedded_vocabulary()
        self._max_len = max_len
        self._count_weight = count_weight
        sentences = corpus if corpus is not None else embedded_corpus()

        self._tri: dict[tuple[int, int], Counter] = defaultdict(Counter)
        self._left: dict[int, Counter] = defaultdict(Counter)
        self._right: dict[int, Counter] = defaultdict(Counter)
        self._uni: Counter = Counter()
        self._uni_total = 0
        for words in sentences:
            ids = self._encode(words)
            for pos in range(1, len(ids) - 1):
                left_id, word_id, right_id = ids[pos - 1], ids[pos], ids[pos + 1]
                self._tri[(left_id, right_id)][word_id] += count_weight
                self._left[left_id][word_id] += count_weight
                self._right[right_id][word_id] += count_weight
                self._uni[word_id] += count_weight
                self._uni_total += count_weight

        size = len(self._vocab)
        uni = np.full(size, 1.0, dtype=np.float64)
        for word_id, n in self._uni.items():
            uni[word_id] += n
        self._uni_probs = uni / (self._uni_total + size)
        self._context_cache: dict[tuple[int, int], np.ndarray] = {}

        rng = np.random.default_rng(_EMBED_SEED)
        self._embeddings = rng.standard_normal((size, _EMBED_DIM))
        self._embeddings.flags.writeable = False

    def _encode(self, words: tuple[str, ...]) -> list[int]:
        v = self._vocab
        inner = [v.token_to_id.get(w, v.unk_id) for w in words]
        return [v.cls_id, *inner, v.sep_id]

    @property
    def vocab(self) -> Vocabulary:
        return self._vocab

    @property
    def max_len(self) -> int:
        return self._max_len

    @property
    def supports_embeddings(self) -> bool:
        return True

    def _smoothed(self, counts: Counter, size: int) -> np.ndarray:
        total = sum(counts.values())
        probs = np.full(size, 1.0, dtype=np.float64)
        for word_id, n in counts.items():
            probs[word_id] += n
        return probs / (total + size)

    def _context_probs(self, left_id: int, right_id: int) -> np.ndarray:
        key = (left_id, right_id)
        cached = self._context_cache.get(key)
        if cached is not None:
            return cached
        size = len(self._vocab)
        probs = (
            _LAMBDA[0] * self._smoothed(self._tri.get(key, Counter()), size)
            + _LAMBDA[1] * self._smoothed(self._left.get(left_id, Counter()), size)
            + _LAMBDA[2] * self._smoothed(self._right.get(right_id, Counter()), size)
            + _LAMBDA[3] * self._uni_probs
        )
        probs.flags.writeable = False
        self._context_cache[key] = probs
        return probs

    def predict_masked(self, token_ids, mask_index):
        n = len(token_ids)
        if not 0 < mask_index < n - 1:
            raise IndexError(f"mask index {mask_index} needs a neighbor on both sides (len {n})")
        return self._context_probs(int(token_ids[mask_index - 1]), int(token_ids[mask_index + 1]))

    def hidden_states(self, token_ids):
        ids = np.asarray(token_ids, dtype=np.int64)
        return self._embeddings[ids]

    def sentence_ids(self, sentence: Sentence) -> list[int]:
        """Convenience encoder used by tests; one id per word plus boundaries."""
        return self._encode(sentence.words)


class UniformOracle(MlmBackend):
    """Predicts the uniform distribution regardless of context."""

    def __init__(self, vocab: Vocabulary | None = None, max_len: int = 128) -> None:
        self._vocab = vocab if vocab is not None else embedded_vocabulary()
        self._max_len = max_len
        size = len(self._vocab)
        self._probs = np.full(size, 1.0 / size, dtype=np.float64)
        self._probs.flags.writeable = False

    @property
    def vocab(self) -> Vocabulary:
        return self._vocab

    @property
    def max_len(self) -> int:
        return self._max_len

    def predict_masked(self, token_ids, mask_index):
        n = len(token_ids)
        if not 0 <= mask_index < n:
            raise IndexError(f"mask index {mask_index} out of range (len {n})")
        return self._probs
