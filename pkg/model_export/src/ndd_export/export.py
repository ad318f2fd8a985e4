"""Checkpoint-to-bundle conversion with a frozen parity record.

Bundle layout (one directory):
  model.onnx     graph with inputs (token ids, attention mask), both int64
                 [batch, len], and outputs (logits float32 [batch, len, c],
                 final hidden states float32 [batch, len, h])
  vocab.txt      one token per line, line number = token id
  bundle.json    max_len, special token strings, casing flag, hidden size
  parity.json    per-probe top-32 masked-word probabilities computed here,
                 in the source framework, for the consumer to verify its own
                 wiring against
  manifest.json  provenance: source checkpoint, tool versions, probe list;
                 written last, so its presence marks a completed export

The parity pipeline mirrors the consumer step for step: the masked word's
pieces collapse to a single mask token between [CLS] and [SEP], the
mask-slot logits soften to a float64 distribution, every entry is floored
to 1e-12, renormalized, floored again, and the 32 most probable entries
are recorded. On a graph failure the metadata files are left in place for
diagnosis; only a successful run writes the manifest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import torch
import transformers
from transformers import AutoModelForMaskedLM, AutoTokenizer

from .errors import CheckpointError, ConfigError, GraphError
from .probes import DEFAULT_PROBES, MIN_PROBES, Probe

BUNDLE_MODEL = "model.onnx"
BUNDLE_VOCAB = "vocab.txt"
BUNDLE_CONFIG = "bundle.json"
BUNDLE_PARITY = "parity.json"
BUNDLE_MANIFEST = "manifest.json"

# Floor the consumer applies before divergence math; applied here too so
# both sides compare the same numbers.
PROB_FLOOR = 1e-12
# Entries kept per probe: enough to catch wiring bugs, small on disk.
TOP_K = 32
# The consumer rejects bundles whose sequence limit is shorter than this.
MIN_MAX_LEN = 8

_INPUT_NAMES = ("input_ids", "attention_mask")
_OUTPUT_NAMES = ("logits", "hidden_states")


@dataclass(frozen=True)
class ExportManifest:
    """Provenance record written alongside the bundle."""

    model_id: str
    out_dir: str
    opset: int
    torch_version: str
    transformers_version: str
    tolerance: float
    probes: tuple[Probe, ...]
    graph_emitted: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "model_id": self.model_id,
            "out_dir": self.out_dir,
            "opset": self.opset,
            "torch_version": self.torch_version,
            "transformers_version": self.transformers_version,
            "tolerance": self.tolerance,
            "probes": [
                {"words": list(probe.words), "mask_word": probe.mask_word}
                for probe in self.probes
            ],
            "graph_emitted": self.graph_emitted,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


class _BundleModule(torch.nn.Module):
    """Adapter giving the traced graph exactly the two contract outputs."""

    def __init__(self, model: torch.nn.Module) -> None:
        super().__init__()
        self.model = model

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor):
        out = self.model(
            input_ids=input_ids,
            attention_mask=attention_mask,
            output_hidden_states=True,
            return_dict=True,
        )
        # float32 is the contract dtype whatever precision the checkpoint uses
        return out.logits.float(), out.hidden_states[-1].float()


def _load_checkpoint(model_id: str | Path) -> tuple[Any, Any]:
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
    except Exception as exc:  # loader failure modes vary by transformers version
        raise CheckpointError(f"cannot load tokenizer from {str(model_id)!r}: {exc}") from exc
    try:
        model = AutoModelForMaskedLM.from_pretrained(model_id)
    except Exception as exc:
        raise CheckpointError(
            f"cannot load masked-LM weights from {str(model_id)!r}: {exc}"
        ) from exc
    return model.eval(), tokenizer


def _vocab_tokens(tokenizer: Any) -> tuple[str, ...]:
    """Token list in id order; line k of vocab.txt must be token id k."""
    mapping = tokenizer.get_vocab()
    size = len(mapping)
    tokens: list[str | None] = [None] * size
    for token, token_id in mapping.items():
        if not isinstance(token_id, int) or not 0 <= token_id < size or tokens[token_id] is not None:
            raise CheckpointError(
                f"vocabulary ids must be unique and contiguous, broken at {token!r} -> {token_id!r}"
            )
        if "\n" in token or "\r" in token:
            raise CheckpointError(f"token {token!r} contains a line break")
        tokens[token_id] = token
    return tuple(tokens)  # every slot filled: ids are unique and in range


def _specials(tokenizer: Any, tokens: Sequence[str]) -> dict[str, str]:
    strings = {
        "pad": tokenizer.pad_token,
        "unk": tokenizer.unk_token,
        "cls": tokenizer.cls_token,
        "sep": tokenizer.sep_token,
        "mask": tokenizer.mask_token,
    }
    missing = sorted(name for name, token in strings.items() if not token)
    if missing:
        raise CheckpointError(f"tokenizer defines no {', '.join(missing)} token")
    if strings["mask"] != "[MASK]":
        raise CheckpointError(
            f'the consumer requires the literal mask token "[MASK]", got {strings["mask"]!r}'
        )
    vocabulary = set(tokens)
    absent = sorted(token for token in strings.values() if token not in vocabulary)
    if absent:
        raise CheckpointError(
            f"special token(s) missing from the vocabulary: {', '.join(absent)}"
        )
    return strings


def _bundle_config(model: Any, tokenizer: Any, tokens: Sequence[str]) -> dict[str, Any]:
    max_len = int(getattr(model.config, "max_position_embeddings", 0))
    if max_len < MIN_MAX_LEN:
        raise CheckpointError(
            f"position limit {max_len} is below the consumer minimum {MIN_MAX_LEN}"
        )
    hidden_size = int(getattr(model.config, "hidden_size", 0))
    if hidden_size < 1:
        raise CheckpointError("checkpoint config declares no hidden size")
    return {
        "max_len": max_len,
        "specials": _specials(tokenizer, tokens),
        "lowercase": bool(getattr(tokenizer, "do_lower_case", False)),
        "hidden_size": hidden_size,
    }


def _probe_ids(tokenizer: Any, probe: Probe, max_len: int) -> tuple[list[int], int]:
    """Token ids for a probe, its masked word collapsed to one mask token.

    Mirrors the consumer's framing: [CLS], each word's pieces in order (the
    masked word contributes exactly one mask token), then [SEP]. Returns the
    ids and the mask token's position.
    """
    pieces = [tokenizer.cls_token]
    mask_position = 0
    for number, word in enumerate(probe.words, start=1):
        if number == probe.mask_word:
            mask_position = len(pieces)
            pieces.append(tokenizer.mask_token)
            continue
        word_pieces = tokenizer.tokenize(word)
        pieces.extend(word_pieces if word_pieces else [tokenizer.unk_token])
    pieces.append(tokenizer.sep_token)
    if len(pieces) > max_len:
        raise ConfigError(
            f"probe {' '.join(probe.words)!r} needs {len(pieces)} tokens,"
            f" over the model limit {max_len}"
        )
    return list(tokenizer.convert_tokens_to_ids(pieces)), mask_position


def _mask_distribution(module: _BundleModule, ids: Sequence[int], position: int) -> np.ndarray:
    """Consumer-identical probability vector at the masked slot."""
    input_ids = torch.tensor([list(ids)], dtype=torch.long)
    with torch.no_grad():
        logits, _ = module(input_ids, torch.ones_like(input_ids))
    row = logits[0, position].numpy().astype(np.float64)
    weights = np.exp(row - row.max())
    p = weights / weights.sum()
    p = np.maximum(p, PROB_FLOOR)
    p = p / p.sum()
    return np.maximum(p, PROB_FLOOR)


def _top_entries(p: np.ndarray) -> list[list[Any]]:
    # Probability descending, token id ascending on ties: deterministic files.
    order = np.lexsort((np.arange(p.size), -p))
    return [[int(token_id), float(p[token_id])] for token_id in order[:TOP_K]]


def compute_parity(
    model: Any,
    tokenizer: Any,
    probes: Sequence[Probe],
    *,
    tolerance: float = 1e-3,
    max_len: int | None = None,
) -> dict[str, Any]:
    """Frozen probe predictions in the layout the consumer's parity check reads."""
    module = _BundleModule(model).eval()
    if max_len is None:
        max_len = int(model.config.max_position_embeddings)
    records = []
    for probe in probes:
        ids, position = _probe_ids(tokenizer, probe, max_len)
        distribution = _mask_distribution(module, ids, position)
        records.append(
            {
                "words": list(probe.words),
                "mask_word": probe.mask_word,
                "top": _top_entries(distribution),
            }
        )
    return {"tolerance": float(tolerance), "probes": records}


def _check_output_shapes(
    module: _BundleModule,
    tokenizer: Any,
    probe: Probe,
    vocab_size: int,
    hidden_size: int,
    max_len: int,
) -> list[int]:
    """Dry run on the trace input; abort with diagnostics on a contract break."""
    ids, _ = _probe_ids(tokenizer, probe, max_len)
    input_ids = torch.tensor([ids], dtype=torch.long)
    with torch.no_grad():
        logits, hidden = module(input_ids, torch.ones_like(input_ids))
    problems = []
    if tuple(logits.shape) != (1, len(ids), vocab_size):
        problems.append(
            f"logits shape {tuple(logits.shape)}, contract (1, {len(ids)}, {vocab_size})"
        )
    if tuple(hidden.shape) != (1, len(ids), hidden_size):
        problems.append(
            f"hidden-state shape {tuple(hidden.shape)}, contract (1, {len(ids)}, {hidden_size})"
        )
    if problems:
        raise GraphError("output contract violated: " + "; ".join(problems))
    return ids


def _emit_graph(
    module: _BundleModule, example: tuple[torch.Tensor, torch.Tensor], path: Path, opset: int
) -> None:
    """Serialize the graph, trying the traced exporter then the compiled one."""
    dynamic = {name: {0: "batch", 1: "sequence"} for name in _INPUT_NAMES + _OUTPUT_NAMES}
    failures = []
    for dynamo in (False, True):
        try:
            torch.onnx.export(
                module,
                example,
                str(path),
                input_names=list(_INPUT_NAMES),
                output_names=list(_OUTPUT_NAMES),
                dynamic_axes=dynamic,
                opset_version=opset,
                dynamo=dynamo,
            )
            return
        except Exception as exc:  # serializer availability varies by machine
            failures.append(f"{'compiled' if dynamo else 'traced'} exporter: {exc}")
            path.unlink(missing_ok=True)
    raise GraphError("graph emission failed; " + " | ".join(failures))


def export_bundle(
    model_id: str | Path,
    out_dir: str | Path,
    probes: Sequence[Probe] | None = None,
    *,
    tolerance: float = 1e-3,
    opset: int = 17,
    emit_graph: bool = True,
) -> Path:
    """Convert a checkpoint into a bundle directory and return it.

    Writes vocab.txt, bundle.json, parity.json, model.onnx and manifest.json
    into out_dir. With emit_graph False the graph file is skipped so the rest
    of the bundle can be produced on machines without an ONNX serializer; the
    manifest records which mode ran. All validation happens before the first
    write, so a rejected export leaves no partial directory behind.
    """
    probe_set = DEFAULT_PROBES if probes is None else tuple(probes)
    if len(probe_set) < MIN_PROBES:
        raise ConfigError(f"parity needs at least {MIN_PROBES} probes, got {len(probe_set)}")
    if not tolerance > 0.0:
        raise ConfigError(f"tolerance must be positive, got {tolerance!r}")
    model, tokenizer = _load_checkpoint(model_id)
    tokens = _vocab_tokens(tokenizer)
    config = _bundle_config(model, tokenizer, tokens)
    module = _BundleModule(model).eval()
    trace_ids = _check_output_shapes(
        module, tokenizer, probe_set[0], len(tokens), config["hidden_size"], config["max_len"]
    )
    parity = compute_parity(
        model, tokenizer, probe_set, tolerance=tolerance, max_len=config["max_len"]
    )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / BUNDLE_VOCAB).write_text("\n".join(tokens) + "\n", encoding="utf-8")
    (out / BUNDLE_CONFIG).write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out / BUNDLE_PARITY).write_text(
        json.dumps(parity, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if emit_graph:
        example = (
            torch.tensor([trace_ids], dtype=torch.long),
            torch.ones(1, len(trace_ids), dtype=torch.long),
        )
        _emit_graph(module, example, out / BUNDLE_MODEL, opset)
    manifest = ExportManifest(
        model_id=str(model_id),
        out_dir=str(out),
        opset=int(opset),
        torch_version=torch.__version__,
        transformers_version=transformers.__version__,
        tolerance=float(tolerance),
        probes=probe_set,
        graph_emitted=bool(emit_graph),
    )
    (out / BUNDLE_MANIFEST).write_text(manifest.to_json(), encoding="utf-8")
    return out
