"""Deletion-based sentence compression driven by edit-disturbance scores.

One iteration scores every candidate span up to a length cap, keeps the
sub-threshold candidates, resolves overlaps in favor of the lower score,
and deletes the survivors simultaneously. Iterations repeat to a fixed
point. The search and selection scaffold takes the scorer as a parameter
so score-based baselines reuse it unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .backends.base import MlmBackend
from .core import DivergenceProfile, EditOperation, Sentence, WeightConfig
from .scoring import score_edit

# (sentence, start, end) -> (score, profile or None); lower score = safer deletion
SpanScorer = Callable[[Sentence, int, int], tuple[float, DivergenceProfile | None]]


@dataclass(frozen=True)
class CompressionConfig:
    """Search cap, score threshold, weighting, and iteration budget.

    Candidate spans always score with the mirrored distance weights times
    the absolute-position weights; mu and nu control both decays. The seed
    only drives the random baseline. overlap_keep selects which side of an
    overlapping pair survives; "lower" is the default reading.
    """

    l_max: int = 9
    ndd_max: float = 1.0
    weight_config: WeightConfig = field(
        default_factory=lambda: WeightConfig(mu=0.9, nu=0.9, balanced=True, positional=True)
    )
    max_iterations: int = 10
    seed: int = 0
    overlap_keep: str = "lower"

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError(f"l_max must be >= 1, got {self.l_max}")
        if self.ndd_max < 0.0:
            raise ValueError(f"ndd_max must be >= 0, got {self.ndd_max}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.overlap_keep not in ("lower", "higher"):
            raise ValueError(f"overlap_keep must be 'lower' or 'higher', got {self.overlap_keep!r}")


@dataclass(frozen=True)
class SpanCandidate:
    """A deletion candidate: the inclusive word span and its score in nats."""

    start: int
    end: int
    score: float
    profile: DivergenceProfile | None = None

    def __post_init__(self):
        if self.start < 1 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end}]")

    def length(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: "SpanCandidate") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True)
class IterationRecord:
    """One compression round: what was searched, kept, and produced."""

    input: Sentence
    candidates: tuple[SpanCandidate, ...]
    selected: tuple[SpanCandidate, ...]
    output: Sentence


@dataclass(frozen=True)
class CompressionTrace:
    """Full record of an iterated compression run.

    kept_indices are the 1-based positions, in the original sentence, of
    the words that survive; final is always a subsequence of the input.
    """

    iterations: tuple[IterationRecord, ...]
    final: Sentence
    kept_indices: tuple[int, ...]

    def __post_init__(self):
        if not self.iterations:
            raise ValueError("a trace records at least one iteration")
        for step, rec in enumerate(self.iterations):
            is_last = step == len(self.iterations) - 1
            if len(rec.output) >= len(rec.input) and not is_last:
                raise ValueError("only the final iteration may be a fixed point")
        if self.iterations[-1].output != self.final:
            raise ValueError("final sentence must match the last iteration's output")
        if len(self.kept_indices) != len(self.final):
            raise ValueError("kept_indices must have one entry per surviving word")

    def iteration_count(self) -> int:
        return len(self.iterations)


def _ndd_scorer(backend: MlmBackend, config: CompressionConfig) -> SpanScorer:
    def scorer(sentence: Sentence, start: int, end: int) -> tuple[float, DivergenceProfile | None]:
        profile = score_edit(
            backend, sentence, EditOperation.deletion(start, end), config.weight_config
        )
        return profile.score, profile

    return scorer


def search_spans(
    sentence: Sentence, l_max: int, threshold: float, scorer: SpanScorer
) -> list[SpanCandidate]:
    """Score every deletion span of length <= l_max; keep those strictly below
    the threshold. The full-sentence span is never a candidate."""
    n = len(sentence)
    if n < 2:
        raise ValueError("span search needs a sentence of at least 2 words")
    out = []
    for start in range(1, n + 1):
        for end in range(start, min(n, start + l_max - 1) + 1):
            if start == 1 and end == n:
                continue
            score, profile = scorer(sentence, start, end)
            if score < threshold:
                out.append(SpanCandidate(start, end, score, profile))
    return out


def span_search(
    sentence: Sentence, backend: MlmBackend, config: CompressionConfig
) -> list[SpanCandidate]:
    """All deletion spans scoring under the threshold, in scan order."""
    return search_spans(sentence, config.l_max, config.ndd_max, _ndd_scorer(backend, config))


def select_non_overlapping(
    candidates: Sequence[SpanCandidate], keep: str = "lower"
) -> list[SpanCandidate]:
    """Resolve overlaps until the kept set is pairwise disjoint.

    Candidates are ranked by score (ascending for keep="lower", descending
    for keep="higher"), then longer span first, then smaller start; each is
    kept iff disjoint from everything already kept. Output order follows the
    ranking, and the result is independent of the input ordering.
    """
    if keep not in ("lower", "higher"):
        raise ValueError(f"keep must be 'lower' or 'higher', got {keep!r}")
    sign = 1.0 if keep == "lower" else -1.0
    ranked = sorted(candidates, key=lambda c: (sign * c.score, -c.length(), c.start))
    kept: list[SpanCandidate] = []
    for cand in ranked:
        if all(not cand.overlaps(k) for k in kept):
            kept.append(cand)
    return kept


def delete_spans(sentence: Sentence, spans: Sequence[SpanCandidate]) -> Sentence:
    """Delete disjoint spans simultaneously (applied right to left)."""
    words = list(sentence.words)
    for span in sorted(spans, key=lambda c: c.start, reverse=True):
        del words[span.start - 1 : span.end]
    if not words:
        raise ValueError("deleting the selected spans would empty the sentence")
    return Sentence(tuple(words), sentence.language_tag)


def compress_once_with(
    sentence: Sentence, l_max: int, threshold: float, scorer: SpanScorer, keep: str = "lower"
) -> tuple[Sentence, IterationRecord]:
    """One search + select + delete round with an injected scorer.

    If the selected spans would jointly cover the whole sentence, the
    worst-ranked survivor is dropped so at least one word remains.
    """
    if len(sentence) < 2:
        record = IterationRecord(sentence, (), (), sentence)
        return sentence, record
    candidates = search_spans(sentence, l_max, threshold, scorer)
    selected = select_non_overlapping(candidates, keep)
    if selected and sum(c.length() for c in selected) >= len(sentence):
        selected = selected[:-1]
    output = delete_spans(sentence, selected) if selected else sentence
    record = IterationRecord(sentence, tuple(candidates), tuple(selected), output)
    return output, record


def compress_once(
    sentence: Sentence, backend: MlmBackend, config: CompressionConfig
) -> tuple[Sentence, IterationRecord]:
    """One compression round under the disturbance scorer."""
    return compress_once_with(
        sentence, config.l_max, config.ndd_max, _ndd_scorer(backend, config), config.overlap_keep
    )


def _remove_from_alive(alive: list[int], selected: Sequence[SpanCandidate]) -> None:
    for span in sorted(selected, key=lambda c: c.start, reverse=True):
        del alive[span.start - 1 : span.end]


def compress_with(
    sentence: Sentence,
    l_max: int,
    threshold_for: Callable[[Sentence], float],
    scorer: SpanScorer,
    max_iterations: int,
    keep: str = "lower",
) -> CompressionTrace:
    """Iterate rounds until a fixed point or the iteration budget.

    threshold_for is re-evaluated on each round's input, so score ceilings
    may track the current sentence.
    """
    if max_iterations < 1:
        raise ValueError(f"max_iterations must be >= 1, got {max_iterations}")
    alive = list(range(1, len(sentence) + 1))
    records: list[IterationRecord] = []
    current = sentence
    for _ in range(max_iterations):
        output, record = compress_once_with(current, l_max, threshold_for(current), scorer, keep)
        records.append(record)
        _remove_from_alive(alive, record.selected)
        if output == current:
            break
        current = output
    return CompressionTrace(tuple(records), current, tuple(alive))


def compress(
    sentence: Sentence, backend: MlmBackend, config: CompressionConfig
) -> CompressionTrace:
    """Iterated deletion-based compression under the disturbance scorer."""
    return compress_with(
        sentence,
        config.l_max,
        lambda _: config.ndd_max,
        _ndd_scorer(backend, config),
        config.max_iterations,
        config.overlap_keep,
    )


def random_deletion_indices(n: int, k: int, seed: int) -> tuple[int, ...]:
    """k distinct 1-based positions drawn uniformly from a seeded generator."""
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=k, replace=False)
    return tuple(int(p) + 1 for p in sorted(chosen))


def random_compress(sentence: Sentence, k: int, seed: int) -> Sentence:
    """Delete k uniformly chosen words; the matched-rate random baseline."""
    doomed = set(random_deletion_indices(len(sentence), k, seed))
    words = tuple(w for idx, w in enumerate(sentence.words, start=1) if idx not in doomed)
    if not words:
        raise ValueError("random deletion would empty the sentence")
    return Sentence(words, sentence.language_tag)
