"""Walk through edit-disturbance scoring on one sentence.

Deletes each word in turn, then shows a replacement and a masking edit,
printing the disturbance score next to the perplexity and embedding-cosine
baselines. Runs offline on the embedded oracle by default; pass --model
to use an exported bundle instead.

    python3 scripts/demo_edits.py
    python3 scripts/demo_edits.py --model /path/to/bundle --sentence "..."
"""

import argparse

from ndd.backends import load_bundle
from ndd.backends.toy import NgramOracle
from ndd.core import EditOperation, Sentence, WeightConfig
from ndd.scoring import report_edit


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sentence", default="scholar inspects timid shoe grandly")
    parser.add_argument("--model", default=None, help="model bundle directory (default: embedded oracle)")
    parser.add_argument("--mu", type=float, default=1.0, help="distance decay (1 = unweighted)")
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    backend = load_bundle(args.model) if args.model else NgramOracle()
    sentence = Sentence.from_text(args.sentence)
    weights = WeightConfig(mu=args.mu, nu=1.0, balanced=False, positional=False)

    edits = [(f"delete '{word}'", EditOperation.deletion(k, k))
             for k, word in enumerate(sentence.words, start=1)]
    edits.append(("mask word 2", EditOperation.replace(2, 2, ("[MASK]",))))
    if len(sentence) >= 2:
        edits.append(("swap first two words",
                      EditOperation.replace(1, 2, (sentence.words[1], sentence.words[0]))))

    print(f"sentence: {sentence.text()}")
    print(f"{'edit':<24} {'score':>8} {'ppl_after':>10} {'cosine':>7}")
    for label, edit in edits:
        report = report_edit(backend, sentence, edit, weights)
        cosine = "n/a" if report.embedding_cosine is None else f"{report.embedding_cosine:.3f}"
        print(f"{label:<24} {report.score:>8.4f} {report.ppl_after:>10.2f} {cosine:>7}")


if __name__ == "__main__":
    main()
