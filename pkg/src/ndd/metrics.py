"""Evaluation metrics: kept-token F1, BLEU, tree-depth and subtree profiles
of pruned material, and ranking quality (AP, mAP, ROC-AUC).

Aggregation is count-based so sharded corpus runs merge order-independently.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .datasets import DependencyTree, SrlSentence
from .errors import DegenerateCorpusError
from .predicates import WordRanking

BLEU_EPSILON = 1e-9

DEPTH_BUCKETS = ("1", "2", "3", "4+")
SUBTREE_BUCKETS = ("1", "2", "3+")


def token_f1(system_kept: Iterable[int], gold_kept: Iterable[int]) -> tuple[float, float, float]:
    """Precision, recall, F1 of kept-word index sets.

    Convention: both sets empty scores (1, 1, 1); exactly one empty scores
    (0, 0, 0).
    """
    sys_set, gold_set = set(system_kept), set(gold_kept)
    if not sys_set and not gold_set:
        return 1.0, 1.0, 1.0
    if not sys_set or not gold_set:
        return 0.0, 0.0, 0.0
    overlap = len(sys_set & gold_set)
    precision = overlap / len(sys_set)
    recall = overlap / len(gold_set)
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2.0 * precision * recall / (precision + recall)


def _ngram_counts(words: Sequence[str], n: int) -> Counter:
    return Counter(tuple(words[k : k + n]) for k in range(len(words) - n + 1))


@dataclass(frozen=True)
class BleuCounts:
    """Clipped-match and total n-gram counts plus lengths; mergeable."""

    matches: tuple[int, ...]
    totals: tuple[int, ...]
    candidate_len: int
    reference_len: int

    def merged(self, other: "BleuCounts") -> "BleuCounts":
        return BleuCounts(
            tuple(a + b for a, b in zip(self.matches, other.matches)),
            tuple(a + b for a, b in zip(self.totals, other.totals)),
            self.candidate_len + other.candidate_len,
            self.reference_len + other.reference_len,
        )


@dataclass(frozen=True)
class BleuScore:
    """Per-n clipped precisions (unsmoothed) and the smoothed composite."""

    precisions: tuple[float, ...]
    composite: float
    brevity_penalty: float


def bleu_counts(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4) -> BleuCounts:
    if not candidate or not reference:
        raise ValueError("candidate and reference must be non-empty")
    matches, totals = [], []
    for n in range(1, max_n + 1):
        cand = _ngram_counts(candidate, n)
        ref = _ngram_counts(reference, n)
        matches.append(sum(min(count, ref[gram]) for gram, count in cand.items()))
        totals.append(max(len(candidate) - n + 1, 0))
    return BleuCounts(tuple(matches), tuple(totals), len(candidate), len(reference))


def bleu_from_counts(counts: BleuCounts, epsilon: float | None = BLEU_EPSILON) -> BleuScore:
    """Composite = BP * geometric mean of precisions; zero precisions are
    lifted to epsilon in the composite only (epsilon=None disables that)."""
    precisions = tuple(
        (m / t) if t > 0 else 0.0 for m, t in zip(counts.matches, counts.totals)
    )
    if counts.candidate_len > counts.reference_len:
        bp = 1.0
    else:
        bp = float(np.exp(1.0 - counts.reference_len / counts.candidate_len))
    smoothed = [p if p > 0.0 else epsilon for p in precisions] if epsilon is not None else precisions
    if any(p == 0.0 for p in smoothed):
        composite = 0.0
    else:
        composite = bp * float(np.exp(np.mean([np.log(p) for p in smoothed])))
    return BleuScore(precisions, composite, bp)


def sentence_bleu(
    candidate: Sequence[str], reference: Sequence[str], max_n: int = 4,
    epsilon: float | None = BLEU_EPSILON,
) -> BleuScore:
    return bleu_from_counts(bleu_counts(candidate, reference, max_n), epsilon)


def corpus_bleu(
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]], max_n: int = 4,
    epsilon: float | None = BLEU_EPSILON,
) -> BleuScore:
    """BLEU with n-gram counts and lengths pooled over the whole corpus."""
    if not pairs:
        raise ValueError("corpus BLEU needs at least one pair")
    total = bleu_counts(*pairs[0], max_n=max_n)
    for candidate, reference in pairs[1:]:
        total = total.merged(bleu_counts(candidate, reference, max_n=max_n))
    return bleu_from_counts(total, epsilon)


@dataclass(frozen=True)
class DepthProfile:
    """Share of pruned words at tree depth 1, 2, 3, and 4-or-deeper."""

    proportions: dict[str, float]
    pruned_count: int


def depth_distribution(
    trees: Sequence[DependencyTree], pruned: Sequence[Iterable[int]]
) -> DepthProfile:
    """Pool pruned words corpus-wide and bucket them by node depth."""
    if len(trees) != len(pruned):
        raise ValueError("need one pruned index set per tree")
    buckets = dict.fromkeys(DEPTH_BUCKETS, 0)
    total = 0
    for tree, indices in zip(trees, pruned):
        for idx in indices:
            if not 1 <= idx <= len(tree):
                raise ValueError(f"pruned index {idx} out of range for a {len(tree)}-word tree")
            depth = tree.depths[idx - 1]
            key = str(depth) if depth <= 3 else "4+"
            buckets[key] += 1
            total += 1
    if total == 0:
        return DepthProfile(dict.fromkeys(DEPTH_BUCKETS, 0.0), 0)
    return DepthProfile({k: v / total for k, v in buckets.items()}, total)


@dataclass(frozen=True)
class SubtreeProfile:
    """Per span-length bucket: how often a pruned span is a full subtree."""

    proportions: dict[str, float]
    span_counts: dict[str, int]


def subtree_proportion(
    trees: Sequence[DependencyTree], pruned_spans: Sequence[Sequence[tuple[int, int]]]
) -> SubtreeProfile:
    if len(trees) != len(pruned_spans):
        raise ValueError("need one span list per tree")
    hits = dict.fromkeys(SUBTREE_BUCKETS, 0)
    counts = dict.fromkeys(SUBTREE_BUCKETS, 0)
    for tree, spans in zip(trees, pruned_spans):
        for start, end in spans:
            length = end - start + 1
            key = str(length) if length <= 2 else "3+"
            counts[key] += 1
            if tree.is_subtree_span(start, end):
                hits[key] += 1
    proportions = {
        k: (hits[k] / counts[k]) if counts[k] else 0.0 for k in SUBTREE_BUCKETS
    }
    return SubtreeProfile(proportions, counts)


def _ranked_positions(scores: Sequence[float]) -> list[int]:
    # Descending score; ties broken by earlier sentence position.
    return sorted(range(len(scores)), key=lambda idx: (-scores[idx], idx))


def average_precision(labels: Sequence[bool], scores: Sequence[float]) -> float | None:
    """AP of one ranking; None when the sentence has no positive labels."""
    if len(labels) != len(scores):
        raise ValueError("labels and scores must have equal length")
    positives = sum(bool(b) for b in labels)
    if positives == 0:
        return None
    hits = 0
    precision_sum = 0.0
    for rank, idx in enumerate(_ranked_positions(scores), start=1):
        if labels[idx]:
            hits += 1
            precision_sum += hits / rank
    return precision_sum / positives


def _check_alignment(rankings: Sequence[WordRanking], gold: Sequence[SrlSentence]) -> None:
    if len(rankings) != len(gold):
        raise ValueError("need one ranking per gold sentence")
    for ranking, sent in zip(rankings, gold):
        if ranking.sentence.words != sent.words:
            raise ValueError(
                f"ranking/gold sentence mismatch: {ranking.sentence.words} vs {sent.words}"
            )


def mean_average_precision(
    rankings: Sequence[WordRanking], gold: Sequence[SrlSentence]
) -> float:
    """Mean AP over sentences that contain at least one gold predicate."""
    _check_alignment(rankings, gold)
    values = []
    for ranking, sent in zip(rankings, gold):
        ap = average_precision(sent.is_predicate, ranking.scores)
        if ap is not None:
            values.append(ap)
    if not values:
        raise DegenerateCorpusError("no sentence contains a gold predicate")
    return float(np.mean(values))


def _rank_sum_auc(labels: np.ndarray, scores: np.ndarray) -> float:
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateCorpusError(
            f"ROC-AUC needs both classes, got {n_pos} positives and {n_neg} negatives"
        )
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    ranks = np.empty(labels.size, dtype=np.float64)
    idx = 0
    while idx < labels.size:
        hi = idx
        while hi + 1 < labels.size and sorted_scores[hi + 1] == sorted_scores[idx]:
            hi += 1
        ranks[order[idx : hi + 1]] = (idx + hi) / 2.0 + 1.0  # average rank, 1-based
        idx = hi + 1
    rank_sum = float(ranks[labels].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_auc(
    rankings: Sequence[WordRanking], gold: Sequence[SrlSentence], per_sentence: bool = False
) -> float:
    """Pairwise ROC-AUC with ties counted half.

    Default pools every word corpus-wide; per_sentence=True instead averages
    the AUC of each sentence holding both classes.
    """
    _check_alignment(rankings, gold)
    if per_sentence:
        values = []
        for ranking, sent in zip(rankings, gold):
            flags = np.asarray(sent.is_predicate, dtype=bool)
            if flags.all() or not flags.any():
                continue
            values.append(_rank_sum_auc(flags, np.asarray(ranking.scores, dtype=np.float64)))
        if not values:
            raise DegenerateCorpusError("no sentence contains both classes")
        return float(np.mean(values))
    labels = np.asarray(
        [flag for sent in gold for flag in sent.is_predicate], dtype=bool
    )
    scores = np.asarray(
        [s for ranking in rankings for s in ranking.scores], dtype=np.float64
    )
    return _rank_sum_auc(labels, scores)
