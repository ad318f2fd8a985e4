"""Token inventory shared by tokenizer and backends."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .core import stable_vocab_id
from .errors import DataError

SPECIAL_DEFAULTS = {
    "pad": "[PAD]",
    "unk": "[UNK]",
    "cls": "[CLS]",
    "sep": "[SEP]",
    "mask": "[MASK]",
}


@dataclass(frozen=True)
class Vocabulary:
    """Ordered token list (index = id) plus the five special-token ids."""

    tokens: tuple[str, ...]
    pad_id: int
    unk_id: int
    cls_id: int
    sep_id: int
    mask_id: int
    lowercase: bool = False

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(set(self.tokens)) != len(self.tokens):
            raise DataError("vocabulary entries must be unique")
        for name in ("pad_id", "unk_id", "cls_id", "sep_id", "mask_id"):
            idx = getattr(self, name)
            if not (0 <= idx < len(self.tokens)):
                raise DataError(f"{name}={idx} is not a valid token index")

    @classmethod
    def from_tokens(
        cls,
        tokens: Sequence[str],
        lowercase: bool = False,
        specials: dict[str, str] | None = None,
    ) -> "Vocabulary":
        """Locate the special tokens by string and build the vocabulary."""
        strings = dict(SPECIAL_DEFAULTS)
        if specials:
            strings.update(specials)
        index = {t: i for i, t in enumerate(tokens)}
        ids = {}
        for name, token in strings.items():
            if token not in index:
                raise DataError(f"special token {token!r} ({name}) missing from vocabulary")
            ids[name] = index[token]
        return cls(
            tuple(tokens),
            pad_id=ids["pad"],
            unk_id=ids["unk"],
            cls_id=ids["cls"],
            sep_id=ids["sep"],
            mask_id=ids["mask"],
            lowercase=lowercase,
        )

    @cached_property
    def token_to_id(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tokens)}

    @cached_property
    def vocab_id(self) -> str:
        return stable_vocab_id(self.tokens)

    @cached_property
    def special_ids(self) -> frozenset[int]:
        return frozenset({self.pad_id, self.unk_id, self.cls_id, self.sep_id, self.mask_id})

    @cached_property
    def special_strings(self) -> frozenset[str]:
        return frozenset(self.tokens[i] for i in self.special_ids)

    @property
    def mask_token(self) -> str:
        return self.tokens[self.mask_id]

    def id_of(self, token: str) -> int | None:
        return self.token_to_id.get(token)

    def __len__(self) -> int:
        return len(self.tokens)
