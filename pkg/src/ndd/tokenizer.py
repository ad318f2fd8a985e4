"""WordPiece projection of word sequences onto subword ids.

Greedy longest-match-first with "##" continuation pieces and whole-word
unknown fallback. The word -> subword alignment is kept so word-level
formulas can address subword models.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Sentence
from .errors import SequenceTooLongError
from .vocab import Vocabulary

CONTINUATION = "##"
# Words longer than this are mapped straight to [UNK], mirroring common
# WordPiece implementations.
MAX_WORD_CHARS = 100


@dataclass(frozen=True)
class TokenizedSentence:
    """Subword ids (with boundary specials) plus per-word span alignment.

    word_spans[w] is the half-open [lo, hi) range of token_ids occupied by
    source word w; spans are ordered, disjoint and jointly cover every
    non-special position.
    """

    source: Sentence
    token_ids: tuple[int, ...]
    word_spans: tuple[tuple[int, int], ...]
    vocab: Vocabulary

    def __post_init__(self):
        object.__setattr__(self, "token_ids", tuple(self.token_ids))
        object.__setattr__(self, "word_spans", tuple(tuple(s) for s in self.word_spans))
        if len(self.word_spans) != len(self.source.words):
            raise ValueError("one span per source word required")
        expected_lo = 1  # position 0 is [CLS]
        for lo, hi in self.word_spans:
            if lo != expected_lo or hi <= lo:
                raise ValueError("word spans must be ordered, non-empty and contiguous")
            expected_lo = hi
        if expected_lo != len(self.token_ids) - 1:
            raise ValueError("word spans must cover all non-special tokens")

    def span_of_word(self, word_index: int) -> tuple[int, int]:
        """Half-open token range of the 1-based word_index."""
        return self.word_spans[word_index - 1]

    @property
    def inner_token_count(self) -> int:
        return len(self.token_ids) - 2


def wordpiece_pieces(word: str, vocab: Vocabulary) -> list[str] | None:
    """Split one word into pieces, or None when it cannot be covered."""
    if len(word) > MAX_WORD_CHARS:
        return None
    pieces = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            piece = word[start:end]
            if start > 0:
                piece = CONTINUATION + piece
            if piece in vocab.token_to_id:
                match = piece
                break
            end -= 1
        if match is None:
            return None
        pieces.append(match)
        start = end
    return pieces


def tokenize(sentence: Sentence, vocab: Vocabulary, max_len: int | None = None) -> TokenizedSentence:
    """Project a sentence onto subword ids with word/span alignment.

    Special-token strings (e.g. "[MASK]") appearing as words map directly to
    their ids and bypass case folding. Raises SequenceTooLongError when the
    projection exceeds max_len tokens including [CLS]/[SEP].
    """
    ids = [vocab.cls_id]
    spans = []
    for word in sentence.words:
        if word in vocab.special_strings:
            piece_ids = [vocab.token_to_id[word]]
        else:
            lookup = word.lower() if vocab.lowercase else word
            pieces = wordpiece_pieces(lookup, vocab)
            if pieces is None:
                piece_ids = [vocab.unk_id]
            else:
                piece_ids = [vocab.token_to_id[p] for p in pieces]
        spans.append((len(ids), len(ids) + len(piece_ids)))
        ids.extend(piece_ids)
    ids.append(vocab.sep_id)
    if max_len is not None and len(ids) > max_len:
        raise SequenceTooLongError(needed=len(ids), limit=max_len)
    return TokenizedSentence(sentence, tuple(ids), tuple(spans), vocab)
