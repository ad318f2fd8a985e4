"""Transformer masked-LM backend reading an exported model bundle.

Bundle layout (one directory): model.onnx with inputs (token ids, attention
mask) as int64 [batch, len] and outputs (logits float32 [batch, len, c],
final hidden states float32 [batch, len, h]); vocab.txt, one token per line,
line number = id; bundle.json with max_len, special token strings, casing
flag, and hidden size; parity.json with probe predictions frozen at export
time.

Queries always run one sequence at a time, so batched and sequential
scoring are bit-identical. The session object is injectable for tests.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from ..core import Sentence, VocabDistribution
from ..errors import BackendError, DataError
from ..vocab import SPECIAL_DEFAULTS, Vocabulary
from .base import MlmBackend

BUNDLE_MODEL = "model.onnx"
BUNDLE_VOCAB = "vocab.txt"
BUNDLE_CONFIG = "bundle.json"
BUNDLE_PARITY = "parity.json"

_REQUIRED_CONFIG_KEYS = ("max_len", "specials", "lowercase", "hidden_size")


def _load_config(bundle_dir: Path) -> dict[str, Any]:
    path = bundle_dir / BUNDLE_CONFIG
    if not path.is_file():
        raise DataError(f"bundle config missing: {path}")
    try:
        config = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    for key in _REQUIRED_CONFIG_KEYS:
        if key not in config:
            raise DataError(f"{path}: missing key {key!r}")
    if not isinstance(config["max_len"], int) or config["max_len"] < 8:
        raise DataError(f"{path}: max_len must be an integer >= 8")
    if not isinstance(config["hidden_size"], int) or config["hidden_size"] < 1:
        raise DataError(f"{path}: hidden_size must be a positive integer")
    specials = config["specials"]
    if not isinstance(specials, dict) or set(specials) != set(SPECIAL_DEFAULTS):
        raise DataError(f"{path}: specials must map exactly {sorted(SPECIAL_DEFAULTS)}")
    if specials["mask"] != "[MASK]":
        raise DataError(f'{path}: mask token must be "[MASK]", got {specials["mask"]!r}')
    return config


def _load_vocab(bundle_dir: Path, config: dict[str, Any]) -> Vocabulary:
    path = bundle_dir / BUNDLE_VOCAB
    if not path.is_file():
        raise DataError(f"bundle vocabulary missing: {path}")
    tokens = path.read_text(encoding="utf-8").splitlines()
    if not tokens:
        raise DataError(f"{path}: empty vocabulary")
    return Vocabulary.from_tokens(
        tuple(tokens), lowercase=bool(config["lowercase"]), specials=config["specials"]
    )


def _default_session(model_path: Path):
    try:
        import onnxruntime
    except ImportError as exc:
        raise BackendError(
            "onnxruntime is not installed; install the 'onnx' extra to load model bundles"
        ) from exc
    if not model_path.is_file():
        raise BackendError(f"model file missing: {model_path}")
    return onnxruntime.InferenceSession(str(model_path), providers=["CPUExecutionProvider"])


class OnnxBackend(MlmBackend):
    """Masked-LM inference over an exported bundle directory."""

    def __init__(self, bundle_dir: str | Path, session: Any | None = None) -> None:
        self._dir = Path(bundle_dir)
        if not self._dir.is_dir():
            raise DataError(f"bundle directory missing: {self._dir}")
        config = _load_config(self._dir)
        self._vocab = _load_vocab(self._dir, config)
        self._max_len = int(config["max_len"])
        self._hidden_size = int(config["hidden_size"])
        self._session = session if session is not None else _default_session(self._dir / BUNDLE_MODEL)
        inputs = self._session.get_inputs()
        if len(inputs) != 2:
            raise BackendError(f"model must take (token ids, attention mask), got {len(inputs)} inputs")
        self._input_names = [inp.name for inp in inputs]

    @property
    def vocab(self) -> Vocabulary:
        return self._vocab

    @property
    def max_len(self) -> int:
        return self._max_len

    @property
    def hidden_size(self) -> int:
        return self._hidden_size

    @property
    def supports_embeddings(self) -> bool:
        return True

    def _run(self, token_ids) -> tuple[np.ndarray, np.ndarray]:
        ids = np.asarray(token_ids, dtype=np.int64).reshape(1, -1)
        if ids.shape[1] > self._max_len:
            raise BackendError(f"sequence of {ids.shape[1]} tokens exceeds max_len {self._max_len}")
        mask = np.ones_like(ids)
        feeds = {self._input_names[0]: ids, self._input_names[1]: mask}
        try:
            outputs = self._session.run(None, feeds)
        except Exception as exc:  # session errors vary by runtime
            raise BackendError(f"model run failed: {exc}") from exc
        if len(outputs) < 2:
            raise BackendError(f"model must emit (logits, hidden states), got {len(outputs)} outputs")
        logits, hidden = np.asarray(outputs[0]), np.asarray(outputs[1])
        if logits.shape != (1, ids.shape[1], len(self._vocab)):
            raise BackendError(
                f"logits shape {logits.shape} != (1, {ids.shape[1]}, {len(self._vocab)})"
            )
        if hidden.shape != (1, ids.shape[1], self._hidden_size):
            raise BackendError(
                f"hidden-state shape {hidden.shape} != (1, {ids.shape[1]}, {self._hidden_size})"
            )
        return logits[0], hidden[0]

    def predict_masked(self, token_ids, mask_index):
        n = len(token_ids)
        if not 0 <= mask_index < n:
            raise IndexError(f"mask index {mask_index} out of range (len {n})")
        logits, _ = self._run(token_ids)
        row = logits[mask_index].astype(np.float64)
        return np.exp(row - row.max())  # stable softmax numerator; scoring normalizes

    def hidden_states(self, token_ids):
        _, hidden = self._run(token_ids)
        return hidden.astype(np.float64)


def load_bundle(bundle_dir: str | Path, session: Any | None = None) -> OnnxBackend:
    return OnnxBackend(bundle_dir, session)


def check_parity(backend: OnnxBackend, bundle_dir: str | Path | None = None) -> list[dict[str, Any]]:
    """Compare the backend against the bundle's frozen probe predictions.

    Returns one record per probe with its max absolute probability error.
    The parity file stores, per probe, the masked word position and the
    top token probabilities computed by the exporting framework after the
    same floor-and-renormalize pipeline.
    """
    from ..scoring import masked_distribution  # local import to avoid a cycle
    from ..tokenizer import tokenize

    directory = Path(bundle_dir) if bundle_dir is not None else backend._dir
    path = directory / BUNDLE_PARITY
    if not path.is_file():
        raise DataError(f"parity file missing: {path}")
    parity = json.loads(path.read_text(encoding="utf-8"))
    probes = parity.get("probes", [])
    if len(probes) < 16:
        raise DataError(f"{path}: parity needs >= 16 probes, found {len(probes)}")
    tolerance = float(parity.get("tolerance", 1e-3))
    results = []
    for number, probe in enumerate(probes):
        sentence = Sentence(tuple(probe["words"]))
        tok = tokenize(sentence, backend.vocab, backend.max_len)
        dist: VocabDistribution = masked_distribution(backend, tok, int(probe["mask_word"]))
        errors = [
            abs(float(dist.probabilities[int(token_id)]) - float(expected))
            for token_id, expected in probe["top"]
        ]
        results.append(
            {
                "probe": number,
                "max_abs_error": max(errors),
                "tolerance": tolerance,
                "ok": max(errors) <= tolerance,
            }
        )
    return results


def verify_parity(backend: OnnxBackend, bundle_dir: str | Path | None = None) -> None:
    """Raise when any probe misses the export-time predictions."""
    results = check_parity(backend, bundle_dir)
    bad = [r for r in results if not r["ok"]]
    if bad:
        worst = max(r["max_abs_error"] for r in bad)
        raise BackendError(
            f"parity check failed on {len(bad)}/{len(results)} probes (worst error {worst:.2e})"
        )
