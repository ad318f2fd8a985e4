"""Parity probe set and probe-file loading.

A probe is one sentence plus the 1-based position of the word to mask.
The built-in probes stay plain lowercase ASCII so that any reasonable
checkpoint normalizer (lowercasing, accent stripping) maps them exactly
the way the consuming tokenizer does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError

# The consumer refuses parity files with fewer probes than this.
MIN_PROBES = 16


@dataclass(frozen=True)
class Probe:
    """One masked-prediction test case: a sentence and the word to mask."""

    words: tuple[str, ...]
    mask_word: int  # 1-based position of the masked word

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if not self.words:
            raise ValueError("probe needs at least one word")
        for word in self.words:
            if not word or any(ch.isspace() for ch in word):
                raise ValueError(f"probe word {word!r} must be non-empty and whitespace-free")
        if not 1 <= self.mask_word <= len(self.words):
            raise ValueError(
                f"mask_word {self.mask_word} out of range for a {len(self.words)}-word probe"
            )


DEFAULT_PROBES: tuple[Probe, ...] = (
    Probe(("the", "carpenter", "repairs", "the", "broken", "chair"), 3),
    Probe(("she", "poured", "water", "into", "the", "glass"), 2),
    Probe(("a", "dog", "slept", "under", "the", "wooden", "table"), 4),
    Probe(("the", "train", "arrived", "late", "in", "the", "evening"), 1),
    Probe(("he", "wrote", "a", "long", "letter", "to", "his", "brother"), 5),
    Probe(("the", "children", "played", "outside", "after", "school"), 3),
    Probe(("rain", "fell", "quietly", "on", "the", "empty", "street"), 6),
    Probe(("the", "doctor", "examined", "the", "patient", "carefully"), 2),
    Probe(("they", "walked", "across", "the", "old", "stone", "bridge"), 7),
    Probe(("the", "chef", "added", "salt", "to", "the", "soup"), 4),
    Probe(("a", "small", "bird", "landed", "on", "the", "window"), 3),
    Probe(("the", "teacher", "explained", "the", "lesson", "twice"), 5),
    Probe(("wind", "moved", "slowly", "through", "the", "tall", "trees"), 1),
    Probe(("she", "keeps", "her", "keys", "in", "a", "drawer"), 4),
    Probe(("the", "farmer", "planted", "corn", "in", "the", "field"), 2),
    Probe(("he", "closed", "the", "door", "and", "locked", "it"), 6),
    Probe(("the", "library", "opens", "early", "on", "weekdays"), 3),
    Probe(("a", "candle", "burned", "on", "the", "kitchen", "shelf"), 2),
    Probe(("the", "boat", "drifted", "toward", "the", "rocky", "shore"), 4),
    Probe(("snow", "covered", "the", "roof", "of", "the", "barn"), 2),
)


def load_probes(path: str | Path) -> tuple[Probe, ...]:
    """Read probes from a JSON file: a list of {"words": [...], "mask_word": k}."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read probes file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ConfigError(f"{path}: probes file must hold a JSON list")
    probes = []
    for number, entry in enumerate(raw):
        if not isinstance(entry, dict) or "words" not in entry or "mask_word" not in entry:
            raise ConfigError(
                f"{path}: probe {number} must be an object with words and mask_word"
            )
        words = entry["words"]
        if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
            raise ConfigError(f"{path}: probe {number}: words must be a list of strings")
        try:
            probes.append(Probe(tuple(words), int(entry["mask_word"])))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: probe {number}: {exc}") from exc
    return tuple(probes)
