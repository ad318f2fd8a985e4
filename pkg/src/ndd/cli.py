"""Command-line surface: score one edit, compress text, run evaluations.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 backend
error. The bundle directory comes from --model or the NDD_MODEL_DIR
environment variable; --backend toy needs no files at all.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .backends import NgramOracle, load_bundle
from .backends.base import MlmBackend
from .compress import CompressionConfig, compress
from .core import EditOperation, Sentence, WeightConfig
from .datasets import load_compression_jsonl_with_skips, load_conll2009, load_conllu
from .errors import BackendError, ConfigError, DataError
from .harness import (
    COMPRESSION_METHODS,
    EDITIONS,
    PRUNING_METHODS,
    SCORERS,
    run_compression_eval,
    run_predicate_eval,
    run_pruning_eval,
)
from .reports import EvalReport, file_fingerprint
from .scoring import report_edit


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--backend", choices=("toy", "bundle"), default="toy",
        help="toy: embedded deterministic oracle; bundle: exported model directory",
    )
    parser.add_argument(
        "--model", default=None,
        help="model bundle directory (default: $NDD_MODEL_DIR when --backend bundle)",
    )


def _add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--report-out", default=None, help="write the JSON report to this path")
    parser.add_argument("--json", action="store_true", help="print JSON instead of text")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads for corpus runs")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized baselines")


def _add_compression_flags(parser: argparse.ArgumentParser, lmax_default: int) -> None:
    parser.add_argument("--lmax", type=int, default=lmax_default, help="max deletion span length")
    parser.add_argument("--nddmax", type=float, default=1.0, help="score threshold in nats")
    parser.add_argument("--mu", type=float, default=0.9, help="distance decay")
    parser.add_argument("--nu", type=float, default=0.9, help="position decay")
    parser.add_argument("--max-iterations", type=int, default=10)
    parser.add_argument("--overlap-keep", choices=("lower", "higher"), default="lower",
                        help="which of two overlapping candidate spans survives")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndd",
        description="Score the semantic disturbance of sentence edits and apply it "
        "to compression, treebank pruning, and predicate detection.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_score = sub.add_parser("score", help="score a single edit")
    p_score.add_argument("--before", required=True, help="original sentence")
    p_score.add_argument("--after", default=None, help="edited sentence (single-span diff)")
    p_score.add_argument("--edit", default=None,
                         help="explicit edit start:end[:replacement words] (1-based, inclusive)")
    p_score.add_argument("--mu", type=float, default=1.0, help="distance decay (1 = unweighted)")
    p_score.add_argument("--nu", type=float, default=1.0, help="position decay (needs --positional)")
    p_score.add_argument("--balanced", action="store_true", help="mirror-boosted distance weights")
    p_score.add_argument("--positional", action="store_true", help="multiply in position decay")
    p_score.add_argument("--json", action="store_true", help="print full-precision JSON")
    p_score.add_argument("-v", "--verbose", action="store_true", help="per-neighbor divergence table")
    _add_backend_flags(p_score)

    p_comp = sub.add_parser("compress", help="compress sentences from a file or stdin")
    p_comp.add_argument("--input", required=True, help="input path, or - for stdin")
    p_comp.add_argument("--input-format", choices=("plain", "jsonl"), default="plain",
                        help="plain: one sentence per line; jsonl: objects with a 'sentence' field")
    p_comp.add_argument("--trace", action="store_true", help="emit a JSONL trace per sentence")
    p_comp.add_argument("--output", default=None, help="output path (default stdout)")
    p_comp.add_argument("--jobs", type=int, default=1)
    _add_compression_flags(p_comp, lmax_default=9)
    _add_backend_flags(p_comp)

    p_ec = sub.add_parser("eval-compression", help="evaluate compression against gold pairs")
    p_ec.add_argument("--data", required=True, help="JSONL corpus with sentence/compression fields")
    p_ec.add_argument("--method", choices=COMPRESSION_METHODS, default="ndd")
    _add_compression_flags(p_ec, lmax_default=9)
    _add_report_flags(p_ec)
    _add_backend_flags(p_ec)

    p_ep = sub.add_parser("eval-pruning", help="depth/subtree profile of pruned treebank words")
    p_ep.add_argument("--conllu", required=True, help="CoNLL-U treebank path")
    p_ep.add_argument("--method", choices=PRUNING_METHODS, default="ndd")
    _add_compression_flags(p_ep, lmax_default=3)
    _add_report_flags(p_ep)
    _add_backend_flags(p_ep)

    p_pd = sub.add_parser("eval-predicates", help="rank words by predicate-likelihood")
    p_pd.add_argument("--conll2009", required=True, help="CoNLL-2009 corpus path")
    p_pd.add_argument("--edition", choices=EDITIONS, default="ensemble")
    p_pd.add_argument("--scorer", choices=SCORERS, default="ndd")
    p_pd.add_argument("--replacement-word", default="a",
                      help="word used by the word-replacement edition")
    p_pd.add_argument("--mu", type=float, default=0.9, help="distance decay")
    p_pd.add_argument("--ppl-relative", action="store_true",
                      help="rank by perplexity change instead of the absolute level")
    p_pd.add_argument("--macro-auc", action="store_true",
                      help="also report per-sentence macro-averaged AUC")
    _add_report_flags(p_pd)
    _add_backend_flags(p_pd)

    return parser


def _resolve_backend(args: argparse.Namespace) -> MlmBackend:
    if args.backend == "toy":
        if args.model:
            raise ConfigError("--model is only valid with --backend bundle")
        return NgramOracle()
    model_dir = args.model or os.environ.get("NDD_MODEL_DIR")
    if not model_dir:
        raise ConfigError("--backend bundle needs --model or NDD_MODEL_DIR")
    return load_bundle(model_dir)


def _parse_edit(text: str) -> EditOperation:
    parts = text.split(":", 2)
    if len(parts) < 2:
        raise ConfigError(f"--edit must be start:end[:replacement], got {text!r}")
    try:
        start, end = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f"--edit positions must be integers, got {text!r}") from exc
    try:
        if len(parts) == 2 or not parts[2]:
            return EditOperation.deletion(start, end)
        return EditOperation.replace(start, end, tuple(parts[2].split()))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def infer_edit(before: Sentence, after: Sentence) -> EditOperation:
    """Single-span diff via longest-common-prefix/suffix trimming.

    Pure insertions widen the span by one neighboring word so the result
    is expressible as a span replacement.
    """
    b, a = before.words, after.words
    prefix = 0
    while prefix < len(b) and prefix < len(a) and b[prefix] == a[prefix]:
        prefix += 1
    suffix = 0
    while (
        suffix < len(b) - prefix
        and suffix < len(a) - prefix
        and b[len(b) - 1 - suffix] == a[len(a) - 1 - suffix]
    ):
        suffix += 1
    b_res = b[prefix : len(b) - suffix]
    a_res = a[prefix : len(a) - suffix]
    if not b_res and not a_res:
        return EditOperation.replace(1, 1, (b[0],))  # identity
    if b_res and not a_res:
        return EditOperation.deletion(prefix + 1, len(b) - suffix)
    if b_res:
        return EditOperation.replace(prefix + 1, len(b) - suffix, a_res)
    # pure insertion: include one flanking word in the span
    if prefix >= 1:
        return EditOperation.replace(prefix, prefix, (b[prefix - 1],) + a_res)
    return EditOperation.replace(1, 1, a_res + (b[0],))


def cmd_score(args: argparse.Namespace) -> int:
    if (args.after is None) == (args.edit is None):
        raise ConfigError("provide exactly one of --after or --edit")
    before = Sentence.from_text(args.before)
    if args.edit is not None:
        edit = _parse_edit(args.edit)
        try:
            edit.validate_for(before)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        after = Sentence.from_text(args.after)
        edit = infer_edit(before, after)
    backend = _resolve_backend(args)
    weights = WeightConfig(mu=args.mu, nu=args.nu, balanced=args.balanced,
                           positional=args.positional)
    report = report_edit(backend, before, edit, weights)
    if args.json:
        payload = {
            "before": report.sentence.text(),
            "after": report.edited.text(),
            "edit": {"start": report.edit.start, "end": report.edit.end,
                     "replacement": list(report.edit.replacement)},
            "ndd": report.score,
            "ppl_before": report.ppl_before,
            "ppl_after": report.ppl_after,
            "cosine": report.embedding_cosine,
            "neighbors": [
                {"position": p, "divergence": d, "weight": w}
                for p, d, w in zip(report.profile.neighbor_positions,
                                   report.profile.divergences, report.profile.weights)
            ],
        }
        print(json.dumps(payload, sort_keys=True))
        return 0
    print(f"ndd: {report.score:.2f}")
    print(f"ppl_before: {report.ppl_before:.2f}")
    print(f"ppl_after: {report.ppl_after:.2f}")
    if report.embedding_cosine is not None:
        print(f"cosine: {report.embedding_cosine:.3f}")
    if args.verbose:
        print("position  word            divergence  weight")
        for p, d, w in zip(report.profile.neighbor_positions,
                           report.profile.divergences, report.profile.weights):
            word = report.sentence.words[p - 1]
            print(f"{p:>8}  {word:<14}  {d:>10.6f}  {w:>6.4f}")
    return 0


def _compression_config(args: argparse.Namespace) -> CompressionConfig:
    try:
        return CompressionConfig(
            l_max=args.lmax,
            ndd_max=args.nddmax,
            weight_config=WeightConfig(mu=args.mu, nu=args.nu, balanced=True, positional=True),
            max_iterations=args.max_iterations,
            seed=getattr(args, "seed", 0),
            overlap_keep=args.overlap_keep,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _read_sentences(args: argparse.Namespace) -> list[Sentence]:
    if args.input == "-":
        text = sys.stdin.read()
        origin = "<stdin>"
    else:
        path = Path(args.input)
        if not path.is_file():
            raise DataError(f"input file missing: {path}")
        text = path.read_text(encoding="utf-8")
        origin = str(path)
    sentences = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if args.input_format == "jsonl":
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{origin}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("sentence"), str):
                raise DataError(f"{origin}:{lineno}: expected an object with a 'sentence' string")
            raw = obj["sentence"]
        else:
            raw = line
        words = tuple(raw.split())
        if not words:
            raise DataError(f"{origin}:{lineno}: empty sentence")
        sentences.append(Sentence(words))
    if not sentences:
        raise DataError(f"{origin}: no sentences found")
    return sentences


def cmd_compress(args: argparse.Namespace) -> int:
    config = _compression_config(args)
    backend = _resolve_backend(args)
    sentences = _read_sentences(args)

    from .harness import _map_indexed  # same worker semantics as the eval runners

    def one(_: int, sentence: Sentence):
        if len(sentence) < 2:
            return None
        return compress(sentence, backend, config)

    traces = _map_indexed(one, sentences, args.jobs)
    lines = []
    for sentence, trace in zip(sentences, traces):
        final = sentence if trace is None else trace.final
        if not args.trace:
            lines.append(final.text())
            continue
        payload = {
            "sentence": sentence.text(),
            "compression": final.text(),
            "kept": [1] if trace is None else list(trace.kept_indices),
            "iterations": []
            if trace is None
            else [
                {
                    "input": rec.input.text(),
                    "selected": [[c.start, c.end, c.score] for c in rec.selected],
                    "output": rec.output.text(),
                }
                for rec in trace.iterations
            ],
        }
        lines.append(json.dumps(payload, sort_keys=True))
    output = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0


def _emit_report(report: EvalReport, args: argparse.Namespace) -> int:
    if args.report_out:
        Path(args.report_out).write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return 0


def cmd_eval_compression(args: argparse.Namespace) -> int:
    config = _compression_config(args)
    path = Path(args.data)
    if not path.is_file():
        raise DataError(f"corpus file missing: {path}")
    pairs, skipped = load_compression_jsonl_with_skips(path)
    backend = _resolve_backend(args)
    report = run_compression_eval(
        pairs, backend, config, method=args.method, seed=args.seed, jobs=args.jobs,
        corpus=file_fingerprint(path), skipped_pairs=skipped,
    )
    return _emit_report(report, args)


def cmd_eval_pruning(args: argparse.Namespace) -> int:
    config = _compression_config(args)
    path = Path(args.conllu)
    if not path.is_file():
        raise DataError(f"treebank file missing: {path}")
    trees = load_conllu(path)
    backend = _resolve_backend(args)
    report = run_pruning_eval(
        trees, backend, config, method=args.method, seed=args.seed, jobs=args.jobs,
        corpus=file_fingerprint(path),
    )
    return _emit_report(report, args)


def cmd_eval_predicates(args: argparse.Namespace) -> int:
    path = Path(args.conll2009)
    if not path.is_file():
        raise DataError(f"corpus file missing: {path}")
    sentences = load_conll2009(path)
    backend = _resolve_backend(args)
    report = run_predicate_eval(
        sentences, backend, edition=args.edition, scorer=args.scorer,
        replacement_word=args.replacement_word, mu=args.mu, jobs=args.jobs,
        corpus=file_fingerprint(path), ppl_relative=args.ppl_relative,
        macro_auc=args.macro_auc,
    )
    return _emit_report(report, args)


_COMMANDS = {
    "score": cmd_score,
    "compress": cmd_compress,
    "eval-compression": cmd_eval_compression,
    "eval-pruning": cmd_eval_pruning,
    "eval-predicates": cmd_eval_predicates,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
