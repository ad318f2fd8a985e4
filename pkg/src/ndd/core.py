"""Pure math of the edit-disturbance metric.

Divergence between masked-prediction distributions, the distance/position
weighting schemes, and the weighted-sum aggregation. Nothing here touches a
tokenizer or a model; all functions are pure and safe to call concurrently.

Conventions: word positions are 1-based, KL divergence uses natural log, so
all scores are in nats.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, VocabMismatchError

# Smoothing floor applied to every probability entry so KL stays finite.
PROB_FLOOR = 1e-12
# Tolerance on the sum-to-one invariant of a distribution.
SUM_TOL = 1e-6


@dataclass(frozen=True)
class Sentence:
    """A sequence of words. Positions used in formulas are 1-based."""

    words: tuple[str, ...]
    language_tag: str | None = None

    def __post_init__(self):
        words = tuple(self.words)
        object.__setattr__(self, "words", words)
        if not words:
            raise ValueError("sentence must contain at least one word")
        for w in words:
            if not w:
                raise ValueError("sentence words must be non-empty")
            if any(ch.isspace() for ch in w):
                raise ValueError(f"word {w!r} contains whitespace")

    @classmethod
    def from_text(cls, text: str, language_tag: str | None = None) -> "Sentence":
        return cls(tuple(text.split()), language_tag)

    def text(self) -> str:
        return " ".join(self.words)

    def __len__(self) -> int:
        return len(self.words)


class EditKind(Enum):
    REPLACEMENT = "replacement"
    DELETION = "deletion"


@dataclass(frozen=True)
class EditOperation:
    """Replacement or deletion of the word span [start, end] (inclusive).

    A deletion is exactly a replacement by the empty sequence.
    """

    kind: EditKind
    start: int
    end: int
    replacement: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if self.start < 1 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end}]")
        if (self.kind is EditKind.DELETION) != (len(self.replacement) == 0):
            raise ValueError("deletion edits and only deletion edits have an empty replacement")

    @classmethod
    def deletion(cls, start: int, end: int) -> "EditOperation":
        return cls(EditKind.DELETION, start, end)

    @classmethod
    def replace(cls, start: int, end: int, replacement: Sequence[str]) -> "EditOperation":
        return cls(EditKind.REPLACEMENT, start, end, tuple(replacement))

    def validate_for(self, sentence: Sentence) -> None:
        if self.end > len(sentence):
            raise ValueError(
                f"span [{self.start}, {self.end}] does not fit a {len(sentence)}-word sentence"
            )

    def span_length(self) -> int:
        return self.end - self.start + 1


def _floor_and_renormalize(p: np.ndarray) -> np.ndarray:
    # Floor, renormalize, floor again: the second pass restores the floor the
    # division may have nudged entries below; it moves the sum by at most
    # c * PROB_FLOOR, well inside SUM_TOL for any realistic vocabulary.
    p = np.maximum(p, PROB_FLOOR)
    p = p / p.sum()
    return np.maximum(p, PROB_FLOOR)


@dataclass(frozen=True)
class VocabDistribution:
    """Probability vector over a backend vocabulary at one masked position."""

    probabilities: np.ndarray
    vocab_id: str

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64).copy()
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty 1-D vector")
        if p.min() < PROB_FLOOR:
            raise ValueError("probabilities must be floored to >= %g" % PROB_FLOOR)
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_weights(cls, weights: np.ndarray, vocab_id: str) -> "VocabDistribution":
        """Build from non-negative weights proportional to probabilities."""
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D vector")
        if not np.all(np.isfinite(w)) or w.min() < 0.0:
            raise ValueError("weights must be finite and non-negative")
        total = w.sum()
        if total <= 0.0:
            raise ValueError("weights must have positive mass")
        return cls(_floor_and_renormalize(w / total), vocab_id)

    @classmethod
    def from_logits(cls, logits: np.ndarray, vocab_id: str) -> "VocabDistribution":
        """Softmax raw scores, then floor and renormalize."""
        x = np.asarray(logits, dtype=np.float64)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("logits must be a non-empty 1-D vector")
        if not np.all(np.isfinite(x)):
            raise ValueError("logits must be finite")
        e = np.exp(x - x.max())
        return cls(_floor_and_renormalize(e / e.sum()), vocab_id)

    def __len__(self) -> int:
        return int(self.probabilities.size)


def kl_divergence(d_after: VocabDistribution, d_before: VocabDistribution) -> float:
    """KL divergence (nats) of the edited-sentence distribution from the original.

    Returns sum_i after_i * ln(after_i / before_i); the edited sentence's
    distribution plays the role of the observed one. Non-negative; tiny
    negative float round-off is clamped to zero.
    """
    if d_after.vocab_id != d_before.vocab_id:
        raise VocabMismatchError(
            f"distributions bound to different vocabularies: {d_after.vocab_id!r} vs {d_before.vocab_id!r}"
        )
    a = d_after.probabilities
    b = d_before.probabilities
    if a.shape != b.shape:
        raise DimensionMismatchError(f"distribution sizes differ: {a.size} vs {b.size}")
    value = float(np.sum(a * np.log(a / b)))
    return max(0.0, value)


def neighbor_positions(n: int, i: int, j: int) -> list[int]:
    """1-based positions outside the span [i, j]: [1..i-1] + [j+1..n]."""
    if not (1 <= i <= j <= n):
        raise ValueError(f"invalid span [{i}, {j}] for length {n}")
    return list(range(1, i)) + list(range(j + 1, n + 1))


def distance_weights(n: int, i: int, j: int, mu: float) -> np.ndarray:
    """Distance decay mu**min(|k-i|, |k-j|) for each neighbor position k.

    Aligned with neighbor_positions(n, i, j). mu = 1 disables decay. A span
    covering the whole sentence yields an empty weight vector.
    """
    _check_decay(mu, "mu")
    ks = neighbor_positions(n, i, j)
    return np.array([mu ** min(abs(k - i), abs(k - j)) for k in ks], dtype=np.float64)


def balanced_distance_weights(n: int, i: int, j: int, mu: float) -> np.ndarray:
    """Distance weights plus a mirrored term so boundary words count twice.

    Neighbors are re-indexed 1..n' in surface order with the edited span
    removed (n' = n - span length); each re-indexed position k receives
    a_k + a_{n'+1-k} * mu**n', where a is the plain distance weight vector.
    The reflection index n'+1-k keeps both terms inside 1..n'.
    """
    base = distance_weights(n, i, j, mu)
    n_prime = base.size
    if n_prime == 0:
        return base
    return base + base[::-1] * mu**n_prime


def position_weights(positions: Sequence[int], nu: float) -> np.ndarray:
    """Absolute-position decay nu**k, biasing deletions toward later words.

    Positions are 1-based indices in the original sentence, not re-indexed
    ones: the penalty targets where a word sits in the full sentence.
    """
    _check_decay(nu, "nu")
    for k in positions:
        if k < 1:
            raise ValueError(f"positions must be 1-based, got {k}")
    return np.array([nu**k for k in positions], dtype=np.float64)


def _check_decay(value: float, name: str) -> None:
    if not (0.0 < value <= 1.0):
        raise ValueError(f"{name} must be in (0, 1], got {value}")


@dataclass(frozen=True)
class WeightConfig:
    """Weighting scheme for aggregating per-neighbor divergences.

    mu: distance decay; nu: absolute-position decay; balanced selects the
    mirrored distance weights, positional multiplies in nu**k.
    """

    mu: float = 0.9
    nu: float = 0.9
    balanced: bool = False
    positional: bool = False

    def __post_init__(self):
        _check_decay(self.mu, "mu")
        _check_decay(self.nu, "nu")

    def weights_for_span(self, n: int, i: int, j: int) -> np.ndarray:
        if self.balanced:
            w = balanced_distance_weights(n, i, j, self.mu)
        else:
            w = distance_weights(n, i, j, self.mu)
        if self.positional:
            w = w * position_weights(neighbor_positions(n, i, j), self.nu)
        return w


@dataclass(frozen=True)
class DivergenceProfile:
    """Per-neighbor divergences and weights, plus their weighted sum."""

    neighbor_positions: tuple[int, ...]
    divergences: tuple[float, ...]
    weights: tuple[float, ...]
    score: float

    def __post_init__(self):
        object.__setattr__(self, "neighbor_positions", tuple(self.neighbor_positions))
        object.__setattr__(self, "divergences", tuple(float(d) for d in self.divergences))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not (len(self.neighbor_positions) == len(self.divergences) == len(self.weights)):
            raise DimensionMismatchError("profile fields must have equal length")
        if any(d < 0.0 for d in self.divergences):
            raise ValueError("divergences must be non-negative")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if abs(self.score - self.recomputed_score()) > 1e-9:
            raise ValueError("stored score disagrees with divergences . weights")

    def recomputed_score(self) -> float:
        return float(np.dot(self.divergences, self.weights)) if self.divergences else 0.0


def ndd(
    profile_before: Sequence[VocabDistribution],
    profile_after: Sequence[VocabDistribution],
    weights: Sequence[float],
    positions: Sequence[int] | None = None,
) -> DivergenceProfile:
    """Weighted sum of per-neighbor KL divergences: the edit-disturbance score.

    The caller has already aligned the two profiles position by position
    (neighbor words are textually identical before and after the edit).
    `positions` is metadata for the returned profile; it defaults to 1..m.
    """
    if len(profile_before) != len(profile_after) or len(profile_before) != len(weights):
        raise DimensionMismatchError(
            "before/after profiles and weights must have equal lengths, got "
            f"{len(profile_before)}/{len(profile_after)}/{len(weights)}"
        )
    if positions is None:
        positions = range(1, len(weights) + 1)
    elif len(positions) != len(weights):
        raise DimensionMismatchError("positions length must match weights length")
    divergences = tuple(
        kl_divergence(after, before) for before, after in zip(profile_before, profile_after)
    )
    w = tuple(float(x) for x in weights)
    score = float(np.dot(divergences, w)) if divergences else 0.0
    return DivergenceProfile(tuple(positions), divergences, w, score)


def stable_vocab_id(tokens: Sequence[str]) -> str:
    """Deterministic identifier binding distributions to a token inventory."""
    h = hashlib.sha256("\n".join(tokens).encode("utf-8")).hexdigest()[:12]
    return f"v{len(tokens)}-{h}"
