"""Masked-LM backend interface.

A backend turns a token id sequence with one mask into a vector of
non-negative weights over its vocabulary (proportional to the predicted
probabilities; the scoring layer floors and renormalizes). Backends must be
deterministic -- identical inputs yield identical outputs -- and batched
prediction must equal one-at-a-time prediction bit for bit. Instances are
shared across threads for read-only inference.
"""

from __future__ import annotations

import abc
from typing import Sequence

import numpy as np

from ..errors import UnsupportedOperationError
from ..vocab import Vocabulary

MaskQuery = tuple[Sequence[int], int]


class MlmBackend(abc.ABC):
    @property
    @abc.abstractmethod
    def vocab(self) -> Vocabulary: ...

    @property
    @abc.abstractmethod
    def max_len(self) -> int: ...

    @property
    def name(self) -> str:
        return type(self).__name__

    @property
    def supports_embeddings(self) -> bool:
        return False

    @abc.abstractmethod
    def predict_masked(self, token_ids: Sequence[int], mask_index: int) -> np.ndarray:
        """Weights over the vocabulary at mask_index (token_ids[mask_index] is the mask)."""

    def predict_masked_batch(self, queries: Sequence[MaskQuery]) -> list[np.ndarray]:
        # Overrides may batch internally but must stay elementwise identical
        # to sequential calls.
        return [self.predict_masked(ids, pos) for ids, pos in queries]

    def hidden_states(self, token_ids: Sequence[int]) -> np.ndarray:
        """Final hidden state per token, shape [len, h]."""
        raise UnsupportedOperationError(f"{self.name} does not expose embeddings")
