"""Full evaluation driver for real corpora with an exported model bundle.

Runs whichever evaluations have data supplied, always next to the matching
baselines, and writes one JSON report per run plus a summary of headline
numbers. Compression evaluates the scored method against the unedited
baseline; pruning runs the random baseline at the same per-sentence
deletion count; predicate detection covers the three word editions, their
ensemble, and the perplexity baseline.

    python3 scripts/run_benchmarks.py --model BUNDLE \\
        --compression-data pairs.jsonl --treebank en.conllu \\
        --conll2009 train.conll2009 --out-dir results --jobs 8

Compression on a 10k-pair corpus takes hours on CPU; the treebank and
predicate runs take minutes per thousand sentences.
"""

import argparse
import os
from pathlib import Path

from ndd.backends import load_bundle
from ndd.compress import CompressionConfig
from ndd.datasets import load_compression_jsonl_with_skips, load_conll2009, load_conllu
from ndd.harness import run_compression_eval, run_predicate_eval, run_pruning_eval
from ndd.reports import EvalReport, file_fingerprint


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", default=os.environ.get("NDD_MODEL_DIR"),
                        help="model bundle directory (default: $NDD_MODEL_DIR)")
    parser.add_argument("--compression-data", default=None,
                        help="JSONL pairs with sentence/compression fields")
    parser.add_argument("--treebank", default=None, help="CoNLL-U treebank")
    parser.add_argument("--conll2009", default=None, help="CoNLL-2009 corpus")
    parser.add_argument("--replacement-word", default="a",
                        help="replacement used by the word edition (pick a frequent "
                        "function word of the corpus language)")
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--jobs", type=int, default=max(1, os.cpu_count() or 1))
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def save(report: EvalReport, out_dir: Path, name: str) -> None:
    path = out_dir / f"{name}.json"
    path.write_text(report.to_json())
    print(f"wrote {path}")


def main() -> None:
    args = parse_args()
    if not args.model:
        raise SystemExit("need --model or NDD_MODEL_DIR")
    if not any((args.compression_data, args.treebank, args.conll2009)):
        raise SystemExit("supply at least one corpus to evaluate")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    backend = load_bundle(args.model)
    summary: list[str] = []

    if args.compression_data:
        pairs, skipped = load_compression_jsonl_with_skips(args.compression_data)
        config = CompressionConfig()
        fingerprint = file_fingerprint(args.compression_data)
        for method in ("ndd", "unedited"):
            report = run_compression_eval(
                pairs, backend, config, method=method, seed=args.seed,
                jobs=args.jobs, corpus=fingerprint, skipped_pairs=skipped,
            )
            save(report, out_dir, f"compression_{method}")
            summary.append(
                f"compression/{method}: f1 {report.metrics['f1'] * 100:.1f}, "
                f"bleu {report.metrics['bleu_corpus'] * 100:.1f}"
            )

    if args.treebank:
        trees = load_conllu(args.treebank)
        config = CompressionConfig(l_max=3)
        fingerprint = file_fingerprint(args.treebank)
        for method in ("ndd", "random"):
            report = run_pruning_eval(
                trees, backend, config, method=method, seed=args.seed,
                jobs=args.jobs, corpus=fingerprint,
            )
            save(report, out_dir, f"pruning_{method}")
            summary.append(
                f"pruning/{method}: depth-1 {report.metrics['depth_1'] * 100:.1f}, "
                f"subtree-1 {report.metrics['subtree_1'] * 100:.1f}"
            )

    if args.conll2009:
        sentences = load_conll2009(args.conll2009)
        fingerprint = file_fingerprint(args.conll2009)
        runs = [
            ("predicates_delete", dict(edition="delete", scorer="ndd")),
            ("predicates_mask", dict(edition="mask", scorer="ndd")),
            ("predicates_word", dict(edition="word", scorer="ndd")),
            ("predicates_ensemble", dict(edition="ensemble", scorer="ndd")),
            ("predicates_ppl_delete", dict(edition="delete", scorer="ppl")),
        ]
        for name, options in runs:
            report = run_predicate_eval(
                sentences, backend, replacement_word=args.replacement_word,
                jobs=args.jobs, corpus=fingerprint, **options,
            )
            save(report, out_dir, name)
            summary.append(
                f"{name}: auc {report.metrics['auc'] * 100:.1f}, "
                f"map {report.metrics['map'] * 100:.1f}"
            )

    print()
    for line in summary:
        print(line)


if __name__ == "__main__":
    main()
