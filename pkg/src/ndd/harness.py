"""Corpus evaluation runners behind the eval subcommands.

Each runner maps a pure per-example function over the corpus (optionally
with a thread pool), then folds the records into aggregate metrics. Any
randomness is seeded per example index, so worker count and scheduling
never change a report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence, TypeVar

from .backends.base import MlmBackend
from .baselines import ppl_compress
from .compress import CompressionConfig, compress, random_deletion_indices
from .core import Sentence, WeightConfig
from .datasets import CompressionPair, DependencyTree, SrlSentence
from .errors import ConfigError, DataError
from .metrics import (
    bleu_from_counts,
    bleu_counts,
    BleuCounts,
    depth_distribution,
    mean_average_precision,
    roc_auc,
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
from .reports import EvalReport

_T = TypeVar("_T")
_R = TypeVar("_R")

COMPRESSION_METHODS = ("ndd", "ppl", "random", "unedited")
PRUNING_METHODS = ("ndd", "random")
EDITIONS = ("delete", "mask", "word", "ensemble")
SCORERS = ("ndd", "ppl")


def _map_indexed(
    fn: Callable[[int, _T], _R], items: Sequence[_T], jobs: int
) -> list[_R]:
    """Order-preserving indexed map; jobs > 1 fans out to threads."""
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(items) <= 1:
        return [fn(idx, item) for idx, item in enumerate(items)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(len(items)), items))


def _config_echo(config: CompressionConfig) -> dict[str, Any]:
    return {
        "l_max": config.l_max,
        "ndd_max": config.ndd_max,
        "mu": config.weight_config.mu,
        "nu": config.weight_config.nu,
        "balanced": config.weight_config.balanced,
        "positional": config.weight_config.positional,
        "max_iterations": config.max_iterations,
        "overlap_keep": config.overlap_keep,
    }


def _kept_for_method(
    method: str,
    sentence: Sentence,
    backend: MlmBackend,
    config: CompressionConfig,
    seed: int,
    index: int,
) -> tuple[tuple[int, ...], int]:
    """Kept original indices plus the iteration count that produced them."""
    n = len(sentence)
    if method == "unedited":
        return tuple(range(1, n + 1)), 0
    if n < 2:
        return tuple(range(1, n + 1)), 0
    if method == "ndd":
        trace = compress(sentence, backend, config)
        return trace.kept_indices, trace.iteration_count()
    if method == "ppl":
        trace = ppl_compress(sentence, backend, config)
        return trace.kept_indices, trace.iteration_count()
    if method == "random":
        reference = compress(sentence, backend, config)
        k = n - len(reference.kept_indices)
        doomed = set(random_deletion_indices(n, k, seed + index)) if k else set()
        return tuple(p for p in range(1, n + 1) if p not in doomed), reference.iteration_count()
    raise ConfigError(f"unknown compression method {method!r}")


def run_compression_eval(
    pairs: Sequence[CompressionPair],
    backend: MlmBackend,
    config: CompressionConfig,
    method: str = "ndd",
    seed: int = 0,
    jobs: int = 1,
    corpus: dict[str, Any] | None = None,
    skipped_pairs: int = 0,
) -> EvalReport:
    """Kept-token F1 and BLEU of a compression method against gold pairs."""
    if method not in COMPRESSION_METHODS:
        raise ConfigError(f"method must be one of {COMPRESSION_METHODS}, got {method!r}")
    if not pairs:
        raise DataError("compression corpus is empty")

    def one(index: int, pair: CompressionPair) -> dict[str, Any]:
        kept, iterations = _kept_for_method(method, pair.source, backend, config, seed, index)
        precision, recall, f1 = token_f1(kept, pair.gold_kept)
        record: dict[str, Any] = {
            "index": index,
            "n": len(pair.source),
            "kept": list(kept),
            "gold": sorted(pair.gold_kept),
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "iterations": iterations,
        }
        if pair.gold_kept:
            counts = bleu_counts(
                [pair.source.words[k - 1] for k in kept], list(pair.gold_words())
            )
            record["bleu"] = {
                "matches": list(counts.matches),
                "totals": list(counts.totals),
                "candidate_len": counts.candidate_len,
                "reference_len": counts.reference_len,
            }
            record["bleu_composite"] = bleu_from_counts(counts).composite
        else:
            record["bleu"] = None
            record["bleu_composite"] = None
        return record

    records = _map_indexed(one, pairs, jobs)

    pooled: BleuCounts | None = None
    sentence_composites = []
    for record in records:
        if record["bleu"] is None:
            continue
        counts = BleuCounts(
            tuple(record["bleu"]["matches"]),
            tuple(record["bleu"]["totals"]),
            record["bleu"]["candidate_len"],
            record["bleu"]["reference_len"],
        )
        pooled = counts if pooled is None else pooled.merged(counts)
        sentence_composites.append(record["bleu_composite"])

    count = len(records)
    metrics: dict[str, Any] = {
        "examples": count,
        "precision": sum(r["precision"] for r in records) / count,
        "recall": sum(r["recall"] for r in records) / count,
        "f1": sum(r["f1"] for r in records) / count,
        "kept_ratio": sum(len(r["kept"]) / r["n"] for r in records) / count,
    }
    if pooled is not None:
        score = bleu_from_counts(pooled)
        for n, p in enumerate(score.precisions, start=1):
            metrics[f"bleu_{n}"] = p
        metrics["bleu_corpus"] = score.composite
        metrics["bleu_brevity_penalty"] = score.brevity_penalty
        metrics["bleu_sentence_mean"] = sum(sentence_composites) / len(sentence_composites)

    notes = [
        "precision/recall/f1 are means of per-example values",
        "empty-set f1 convention: both empty -> 1, one empty -> 0",
        "bleu_corpus pools n-gram counts corpus-wide; bleu_sentence_mean averages per-example composites",
    ]
    if skipped_pairs:
        notes.append(f"{skipped_pairs} unalignable pair(s) skipped at load time")

    config_echo = _config_echo(config)
    config_echo.update({"method": method, "seed": seed})
    return EvalReport(
        command="eval-compression",
        metrics=metrics,
        config=config_echo,
        corpus=dict(corpus or {}, examples=count, skipped=skipped_pairs),
        per_example=tuple(records),
        notes=tuple(notes),
    )


def _contiguous_runs(indices: Sequence[int]) -> list[tuple[int, int]]:
    runs = []
    ordered = sorted(indices)
    start = None
    prev = None
    for idx in ordered:
        if start is None:
            start = prev = idx
        elif idx == prev + 1:
            prev = idx
        else:
            runs.append((start, prev))
            start = prev = idx
    if start is not None:
        runs.append((start, prev))
    return runs


def run_pruning_eval(
    trees: Sequence[DependencyTree],
    backend: MlmBackend,
    config: CompressionConfig,
    method: str = "ndd",
    seed: int = 0,
    jobs: int = 1,
    corpus: dict[str, Any] | None = None,
) -> EvalReport:
    """Depth and subtree profile of the words a method prunes from trees."""
    if method not in PRUNING_METHODS:
        raise ConfigError(f"method must be one of {PRUNING_METHODS}, got {method!r}")
    if not trees:
        raise DataError("treebank is empty")
    sentences = []
    for pos, tree in enumerate(trees):
        try:
            sentences.append(Sentence(tree.words))
        except ValueError as exc:
            raise DataError(f"tree {pos}: {exc}") from exc

    def one(index: int, sentence: Sentence) -> dict[str, Any]:
        kept, _ = _kept_for_method(method, sentence, backend, config, seed, index)
        pruned = sorted(set(range(1, len(sentence) + 1)) - set(kept))
        return {
            "index": index,
            "n": len(sentence),
            "kept": list(kept),
            "pruned_runs": [list(run) for run in _contiguous_runs(pruned)],
        }

    records = _map_indexed(one, sentences, jobs)
    pruned_sets = [
        [p for run in record["pruned_runs"] for p in range(run[0], run[1] + 1)]
        for record in records
    ]
    runs = [[tuple(run) for run in record["pruned_runs"]] for record in records]
    depth = depth_distribution(trees, pruned_sets)
    subtree = subtree_proportion(trees, runs)

    total_words = sum(record["n"] for record in records)
    metrics: dict[str, Any] = {
        "examples": len(records),
        "pruned_words": depth.pruned_count,
        "pruned_ratio": depth.pruned_count / total_words,
    }
    for bucket, value in depth.proportions.items():
        metrics[f"depth_{bucket}"] = value
    for bucket, value in subtree.proportions.items():
        metrics[f"subtree_{bucket}"] = value
        metrics[f"subtree_{bucket}_spans"] = subtree.span_counts[bucket]

    config_echo = _config_echo(config)
    config_echo.update({"method": method, "seed": seed})
    return EvalReport(
        command="eval-pruning",
        metrics=metrics,
        config=config_echo,
        corpus=dict(corpus or {}, examples=len(records)),
        per_example=tuple(records),
        notes=(
            "pruned spans are maximal contiguous runs of pruned words in source order",
            "depth buckets pool pruned words corpus-wide",
        ),
    )


def _ranking_for(
    sentence: Sentence,
    backend: MlmBackend,
    edition: str,
    scorer: str,
    replacement_word: str,
    weight_config: WeightConfig,
    ppl_relative: bool,
) -> WordRanking:
    modes = {
        "delete": EditionMode(EditKindForWord.DELETE),
        "mask": EditionMode(EditKindForWord.REPLACE_BY_MASK),
        "word": EditionMode(EditKindForWord.REPLACE_BY_WORD, replacement_word),
    }
    if scorer == "ndd":
        if edition == "ensemble":
            rankings = [
                word_edit_scores(sentence, backend, mode, weight_config)
                for mode in modes.values()
            ]
            return ensemble_scores(rankings)
        return word_edit_scores(sentence, backend, modes[edition], weight_config)
    if edition not in ("delete", "mask"):
        raise ConfigError("perplexity scoring supports editions 'delete' and 'mask' only")
    return ppl_word_scores(sentence, backend, modes[edition], relative=ppl_relative)


def run_predicate_eval(
    sentences: Sequence[SrlSentence],
    backend: MlmBackend,
    edition: str = "ensemble",
    scorer: str = "ndd",
    replacement_word: str = "a",
    mu: float = 0.9,
    jobs: int = 1,
    corpus: dict[str, Any] | None = None,
    ppl_relative: bool = False,
    macro_auc: bool = False,
) -> EvalReport:
    """Ranking quality (mAP, AUC) of per-word edit scores against gold flags."""
    if edition not in EDITIONS:
        raise ConfigError(f"edition must be one of {EDITIONS}, got {edition!r}")
    if scorer not in SCORERS:
        raise ConfigError(f"scorer must be one of {SCORERS}, got {scorer!r}")
    if scorer == "ppl" and edition in ("word", "ensemble"):
        raise ConfigError("perplexity scoring supports editions 'delete' and 'mask' only")
    if not sentences:
        raise DataError("predicate corpus is empty")
    weight_config = WeightConfig(mu=mu, nu=1.0, balanced=False, positional=False)

    def one(index: int, sent: SrlSentence) -> dict[str, Any]:
        if len(sent.words) < 2:
            return {"index": index, "skipped": "single-word sentence", "flags": list(sent.is_predicate)}
        ranking = _ranking_for(
            sent.sentence(), backend, edition, scorer, replacement_word, weight_config, ppl_relative
        )
        return {
            "index": index,
            "scores": [float(s) for s in ranking.scores],
            "flags": list(sent.is_predicate),
        }

    records = _map_indexed(one, sentences, jobs)
    scored = [
        (record, sentences[record["index"]])
        for record in records
        if "skipped" not in record
    ]
    if not scored:
        raise DataError("every sentence was skipped; nothing to rank")
    rankings = [
        WordRanking(sent.sentence(), tuple(record["scores"]), "eval")
        for record, sent in scored
    ]
    gold = [sent for _, sent in scored]
    metrics: dict[str, Any] = {
        "examples": len(records),
        "scored": len(scored),
        "map": mean_average_precision(rankings, gold),
        "auc": roc_auc(rankings, gold),
    }
    if macro_auc:
        metrics["auc_macro"] = roc_auc(rankings, gold, per_sentence=True)

    notes = [
        "map averages per-sentence AP over sentences with >= 1 gold predicate",
        "auc pools all words corpus-wide; ties count half",
    ]
    skipped = len(records) - len(scored)
    if skipped:
        notes.append(f"{skipped} sentence(s) skipped (fewer than 2 words)")
    return EvalReport(
        command="eval-predicates",
        metrics=metrics,
        config={
            "edition": edition,
            "scorer": scorer,
            "replacement_word": replacement_word if edition in ("word", "ensemble") else None,
            "mu": mu,
            "ppl_relative": ppl_relative if scorer == "ppl" else None,
        },
        corpus=dict(corpus or {}, examples=len(records)),
        per_example=tuple(records),
        notes=tuple(notes),
    )
