"""Run all three evaluations on the bundled toy fixtures.

Everything is offline and deterministic: the embedded n-gram oracle scores
the five compression pairs, three dependency trees, and six predicate
sentences that ship in tests/fixtures. Reports land in --out-dir as JSON,
and the text view of each is printed.

    python3 scripts/run_toy_eval.py --out-dir results
"""

import argparse
from pathlib import Path

from ndd.backends.toy import NgramOracle
from ndd.compress import CompressionConfig
from ndd.datasets import load_compression_jsonl, load_conll2009, load_conllu
from ndd.harness import run_compression_eval, run_predicate_eval, run_pruning_eval
from ndd.reports import file_fingerprint

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results", help="directory for the JSON reports")
    parser.add_argument("--method", default="ndd", choices=("ndd", "ppl", "random", "unedited"))
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    backend = NgramOracle()
    config = CompressionConfig()

    pairs_path = FIXTURES / "compression_pairs.jsonl"
    report = run_compression_eval(
        load_compression_jsonl(pairs_path), backend, config,
        method=args.method, seed=args.seed, corpus=file_fingerprint(pairs_path),
    )
    (out_dir / "compression.json").write_text(report.to_json())
    print(report.to_text())

    trees_path = FIXTURES / "trees.conllu"
    pruning_method = args.method if args.method in ("ndd", "random") else "ndd"
    report = run_pruning_eval(
        load_conllu(trees_path), backend, config,
        method=pruning_method, seed=args.seed, corpus=file_fingerprint(trees_path),
    )
    (out_dir / "pruning.json").write_text(report.to_json())
    print(report.to_text())

    srl_path = FIXTURES / "predicates.conll2009"
    report = run_predicate_eval(
        load_conll2009(srl_path), backend, edition="ensemble", scorer="ndd",
        corpus=file_fingerprint(srl_path),
    )
    (out_dir / "predicates.json").write_text(report.to_json())
    print(report.to_text())

    print(f"reports written to {out_dir}/")


if __name__ == "__main__":
    main()
