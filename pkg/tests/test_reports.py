"""Tests for report serialization determinism and fingerprinting."""

import hashlib
import json

from ndd.reports import EvalReport, file_fingerprint


def sample_report():
    return EvalReport(
        command="eval-compression",
        metrics={"f1": 0.8647619047619047, "kept_ratio": 16 / 21},
        config={"l_max": 9, "ndd_max": 1.0, "backend": "toy"},
        corpus={"file": "pairs.jsonl", "sha256": "ab" * 32, "pairs": 5},
        per_example=(
            {"source": "a b c", "system_kept": [2, 3], "f1": 1.0},
            {"source": "d e", "system_kept": [2], "f1": 0.5},
        ),
        notes=("one pair skipped: not a token subsequence",),
    )


def test_json_round_trip_identical():
    report = sample_report()
    again = EvalReport.from_json(report.to_json())
    assert again == report
    assert again.to_json() == report.to_json()


def test_json_is_key_sorted_and_newline_terminated():
    text = sample_report().to_json()
    assert text.endswith("\n")
    obj = json.loads(text)
    assert list(obj) == sorted(obj)
    assert json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n" == text


def test_report_has_no_timestamps_or_absolute_paths():
    report = sample_report()
    rendered = report.to_json() + report.to_text()
    assert "time" not in rendered.lower()
    assert "/root" not in rendered and "/home" not in rendered and "/tmp" not in rendered


def test_identical_runs_serialize_identically():
    assert sample_report().to_json() == sample_report().to_json()
    assert sample_report().to_text() == sample_report().to_text()


def test_text_rendering_contains_metrics_and_notes():
    text = sample_report().to_text()
    assert "command: eval-compression" in text
    assert "f1" in text and "0.864762" in text
    assert "config.l_max: 9" in text
    assert "corpus.pairs: 5" in text
    assert "note: one pair skipped" in text


def test_file_fingerprint_is_content_hash_and_basename(tmp_path):
    path = tmp_path / "deep" / "corpus.jsonl"
    path.parent.mkdir()
    payload = b'{"sentence": "a", "compression": "a"}\n'
    path.write_bytes(payload)
    fp = file_fingerprint(path)
    assert fp == {"file": "corpus.jsonl", "sha256": hashlib.sha256(payload).hexdigest()}
    moved = tmp_path / "elsewhere.jsonl"
    moved.write_bytes(payload)
    assert file_fingerprint(moved)["sha256"] == fp["sha256"]
