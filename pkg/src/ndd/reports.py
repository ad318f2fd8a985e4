"""Evaluation reports: a deterministic record of one corpus run.

A report carries the aggregate metrics, the per-example records they are
recomputable from, the effective config, and a content fingerprint of the
corpus. No timestamps and no absolute paths, so byte-identical inputs give
byte-identical reports.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


def file_fingerprint(path: str | Path) -> dict[str, Any]:
    """Basename plus content hash; enough to recognize the corpus, no paths."""
    p = Path(path)
    digest = hashlib.sha256(p.read_bytes()).hexdigest()
    return {"file": p.name, "sha256": digest}


@dataclass(frozen=True)
class EvalReport:
    """One evaluation run: aggregates plus everything needed to redo them."""

    command: str
    metrics: dict[str, float]
    config: dict[str, Any]
    corpus: dict[str, Any]
    per_example: tuple[dict[str, Any], ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "per_example", tuple(self.per_example))
        object.__setattr__(self, "notes", tuple(self.notes))

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "metrics": self.metrics,
            "config": self.config,
            "corpus": self.corpus,
            "per_example": list(self.per_example),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        """Aligned key/value view for terminals; metrics to 6 decimals."""
        lines = [f"command: {self.command}"]
        for key in sorted(self.corpus):
            lines.append(f"corpus.{key}: {self.corpus[key]}")
        for key in sorted(self.config):
            lines.append(f"config.{key}: {self.config[key]}")
        lines.append("")
        width = max((len(k) for k in self.metrics), default=0)
        for key in sorted(self.metrics):
            value = self.metrics[key]
            rendered = f"{value:.6f}" if isinstance(value, float) else str(value)
            lines.append(f"{key.ljust(width)}  {rendered}")
        if self.notes:
            lines.append("")
            lines.extend(f"note: {note}" for note in self.notes)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        obj = json.loads(text)
        return cls(
            command=obj["command"],
            metrics=obj["metrics"],
            config=obj["config"],
            corpus=obj["corpus"],
            per_example=tuple(obj["per_example"]),
            notes=tuple(obj["notes"]),
        )
