"""Command line entry: one-shot checkpoint-to-bundle export.

Exit codes: 0 ok, 2 config error (bad flags, bad probes, bad tolerance),
3 checkpoint or filesystem error, 4 graph emission or contract failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .errors import CheckpointError, ConfigError, ExportError, GraphError
from .export import export_bundle
from .probes import DEFAULT_PROBES, load_probes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndd-export",
        description=(
            "Convert a masked-LM checkpoint into an inference bundle"
            " (model.onnx, vocab.txt, bundle.json, parity.json) plus a manifest."
        ),
    )
    parser.add_argument(
        "--model",
        required=True,
        help="checkpoint path or hub id accepted by the transformers loaders",
    )
    parser.add_argument("--out", required=True, help="bundle directory to create")
    parser.add_argument(
        "--probes",
        default=None,
        help="JSON probes file, a list of {words, mask_word}; default: built-in set",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=1e-3,
        help="parity tolerance recorded in the bundle (default 1e-3)",
    )
    parser.add_argument("--opset", type=int, default=17, help="ONNX opset version (default 17)")
    parser.add_argument(
        "--skip-graph",
        action="store_true",
        help="write everything except model.onnx (for machines without an ONNX serializer)",
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        probes = load_probes(args.probes) if args.probes else None
        bundle = export_bundle(
            args.model,
            args.out,
            probes,
            tolerance=args.tolerance,
            opset=args.opset,
            emit_graph=not args.skip_graph,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GraphError, ExportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    count = len(probes) if probes is not None else len(DEFAULT_PROBES)
    print(f"bundle written to {bundle}")
    print(f"parity: {count} probes, tolerance {args.tolerance:g}")
    if args.skip_graph:
        print("graph emission skipped; bundle has no model.onnx")
    return 0


if __name__ == "__main__":
    sys.exit(main())
