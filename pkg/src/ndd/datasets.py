"""Corpus ingestion: compression pairs, dependency trees, predicate flags.

Formats are line-oriented text; every parse error names the file and line.
Loaders validate structural invariants on construction (index ranges, one
root, acyclicity), and each format has a serializer whose output reloads
to field-identical records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .core import Sentence
from .errors import DataError


@dataclass(frozen=True)
class CompressionPair:
    """A source sentence and the gold extractive compression as kept indices."""

    source: Sentence
    gold_kept: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "gold_kept", frozenset(self.gold_kept))
        n = len(self.source)
        if any(not 1 <= k <= n for k in self.gold_kept):
            raise DataError(f"gold indices must lie in [1, {n}]")

    def gold_words(self) -> tuple[str, ...]:
        return tuple(self.source.words[k - 1] for k in sorted(self.gold_kept))


def align_subsequence(source_words: tuple[str, ...], target_words: tuple[str, ...]) -> tuple[int, ...] | None:
    """Greedy left-to-right match of target into source; 1-based indices.

    Returns None when the target is not a subsequence of the source.
    """
    indices = []
    cursor = 0
    for word in target_words:
        while cursor < len(source_words) and source_words[cursor] != word:
            cursor += 1
        if cursor == len(source_words):
            return None
        indices.append(cursor + 1)
        cursor += 1
    return tuple(indices)


@dataclass(frozen=True)
class DependencyTree:
    """A single-rooted dependency tree; head 0 marks the root word."""

    words: tuple[str, ...]
    heads: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "heads", tuple(int(h) for h in self.heads))
        object.__setattr__(self, "labels", tuple(self.labels))
        n = len(self.words)
        if n == 0:
            raise DataError("tree must contain at least one word")
        if len(self.heads) != n or len(self.labels) != n:
            raise DataError("words, heads, and labels must have equal length")
        roots = [i for i, h in enumerate(self.heads, start=1) if h == 0]
        if len(roots) != 1:
            raise DataError(f"tree must have exactly one root, found {len(roots)}")
        for i, h in enumerate(self.heads, start=1):
            if not 0 <= h <= n:
                raise DataError(f"head {h} of word {i} out of range [0, {n}]")
            if h == i:
                raise DataError(f"word {i} is its own head")
        self.depths  # force the walk so cycles fail fast

    def __len__(self) -> int:
        return len(self.words)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        """1-based node depths: the root is depth 1."""
        n = len(self.words)
        depths = [0] * (n + 1)
        for start in range(1, n + 1):
            path = []
            node = start
            while node != 0 and depths[node] == 0:
                if node in path:
                    raise DataError(f"head cycle through word {node}")
                path.append(node)
                node = self.heads[node - 1]
            base = 0 if node == 0 else depths[node]
            for offset, visited in enumerate(reversed(path), start=1):
                depths[visited] = base + offset
        return tuple(depths[1:])

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(len(self.words) + 1)]
        for i, h in enumerate(self.heads, start=1):
            if h != 0:
                kids[h].append(i)
        return tuple(tuple(k) for k in kids)

    def descendant_set(self, node: int) -> frozenset[int]:
        """The node and everything below it (inclusive descendants)."""
        if not 1 <= node <= len(self.words):
            raise DataError(f"node {node} out of range")
        out = set()
        stack = [node]
        while stack:
            cur = stack.pop()
            out.add(cur)
            stack.extend(self._children[cur])
        return frozenset(out)

    @cached_property
    def _subtree_intervals(self) -> frozenset[tuple[int, int]]:
        # A contiguous span equals some node's descendant set iff that set
        # is itself the contiguous interval (min, max) with the full size.
        intervals = set()
        for node in range(1, len(self.words) + 1):
            desc = self.descendant_set(node)
            lo, hi = min(desc), max(desc)
            if hi - lo + 1 == len(desc):
                intervals.add((lo, hi))
        return frozenset(intervals)

    def is_subtree_span(self, start: int, end: int) -> bool:
        """True iff words [start, end] are exactly some node's descendants."""
        if not 1 <= start <= end <= len(self.words):
            raise DataError(f"span [{start}, {end}] out of range")
        return (start, end) in self._subtree_intervals


@dataclass(frozen=True)
class SrlSentence:
    """Words with gold predicate flags."""

    words: tuple[str, ...]
    is_predicate: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "is_predicate", tuple(bool(b) for b in self.is_predicate))
        if len(self.words) != len(self.is_predicate):
            raise DataError("words and predicate flags must have equal length")
        if not self.words:
            raise DataError("sentence must contain at least one word")

    def sentence(self) -> Sentence:
        return Sentence(self.words)

    def predicate_count(self) -> int:
        return sum(self.is_predicate)


def _fail(path: str | Path, lineno: int, message: str) -> DataError:
    return DataError(f"{path}:{lineno}: {message}")


def load_compression_jsonl_with_skips(path: str | Path) -> tuple[list[CompressionPair], int]:
    """Parse {"sentence", "compression"} JSON lines; returns (pairs, skipped).

    Pairs whose compression is not a word subsequence of the sentence are
    skipped and counted rather than loaded.
    """
    pairs: list[CompressionPair] = []
    skipped = 0
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise _fail(path, lineno, f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "sentence" not in obj or "compression" not in obj:
            raise _fail(path, lineno, 'expected an object with "sentence" and "compression"')
        if not isinstance(obj["sentence"], str) or not isinstance(obj["compression"], str):
            raise _fail(path, lineno, '"sentence" and "compression" must be strings')
        source_words = tuple(obj["sentence"].split())
        if not source_words:
            raise _fail(path, lineno, "sentence must contain at least one word")
        kept = align_subsequence(source_words, tuple(obj["compression"].split()))
        if kept is None:
            skipped += 1
            continue
        pairs.append(CompressionPair(Sentence(source_words), frozenset(kept)))
    return pairs, skipped


def load_compression_jsonl(path: str | Path) -> list[CompressionPair]:
    return load_compression_jsonl_with_skips(path)[0]


def serialize_compression_jsonl(pairs: list[CompressionPair]) -> str:
    lines = []
    for pair in pairs:
        obj = {"sentence": pair.source.text(), "compression": " ".join(pair.gold_words())}
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def _sentence_blocks(text: str) -> list[tuple[int, list[tuple[int, str]]]]:
    """Split a blank-line separated file into (start_line, numbered rows)."""
    blocks = []
    current: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if current:
                blocks.append((current[0][0], current))
                current = []
            continue
        current.append((lineno, line))
    if current:
        blocks.append((current[0][0], current))
    return blocks


def load_conllu(path: str | Path) -> list[DependencyTree]:
    """Parse 10-column CoNLL-U; only ID, FORM, HEAD, and DEPREL are consumed.

    Rows with non-integer IDs (multiword ranges, empty nodes) are skipped.
    """
    trees = []
    text = Path(path).read_text(encoding="utf-8")
    for _, rows in _sentence_blocks(text):
        words, heads, labels = [], [], []
        first_lineno = None
        for lineno, line in rows:
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise _fail(path, lineno, f"expected 10 tab-separated columns, got {len(cols)}")
            try:
                word_id = int(cols[0])
            except ValueError:
                continue  # multiword token or empty node row
            if first_lineno is None:
                first_lineno = lineno
            if word_id != len(words) + 1:
                raise _fail(path, lineno, f"word ids must be consecutive, got {word_id}")
            try:
                head = int(cols[6])
            except ValueError as exc:
                raise _fail(path, lineno, f"HEAD must be an integer, got {cols[6]!r}") from exc
            words.append(cols[1])
            heads.append(head)
            labels.append(cols[7])
        if not words:
            continue
        try:
            trees.append(DependencyTree(tuple(words), tuple(heads), tuple(labels)))
        except DataError as exc:
            raise _fail(path, first_lineno, str(exc)) from exc
    return trees


def serialize_conllu(trees: list[DependencyTree]) -> str:
    blocks = []
    for tree in trees:
        rows = []
        for i, (word, head, label) in enumerate(zip(tree.words, tree.heads, tree.labels), start=1):
            rows.append("\t".join([str(i), word, "_", "_", "_", "_", str(head), label, "_", "_"]))
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# CoNLL-2009 column offsets (0-based): FORM is column 2, FILLPRED column 13.
_C09_FORM = 1
_C09_FILLPRED = 12
_C09_MIN_COLS = 13


def load_conll2009(path: str | Path) -> list[SrlSentence]:
    """Parse CoNLL-2009 rows; only FORM and FILLPRED are consumed."""
    sentences = []
    text = Path(path).read_text(encoding="utf-8")
    for _, rows in _sentence_blocks(text):
        words, flags = [], []
        for lineno, line in rows:
            if line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < _C09_MIN_COLS:
                raise _fail(path, lineno, f"expected at least {_C09_MIN_COLS} columns, got {len(cols)}")
            fillpred = cols[_C09_FILLPRED]
            if fillpred not in ("Y", "_"):
                raise _fail(path, lineno, f'FILLPRED must be "Y" or "_", got {fillpred!r}')
            words.append(cols[_C09_FORM])
            flags.append(fillpred == "Y")
        if words:
            sentences.append(SrlSentence(tuple(words), tuple(flags)))
    return sentences


def serialize_conll2009(sentences: list[SrlSentence]) -> str:
    blocks = []
    for sent in sentences:
        rows = []
        for i, (word, flag) in enumerate(zip(sent.words, sent.is_predicate), start=1):
            cols = [str(i), word] + ["_"] * 10 + ["Y" if flag else "_", "_"]
            rows.append("\t".join(cols))
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + ("\n" if blocks else "")
