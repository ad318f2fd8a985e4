"""Command-line surface: exit codes, output formats, golden transcripts."""

import io
import json
from pathlib import Path

import pytest

from ndd.backends.toy import NgramOracle
from ndd.cli import infer_edit, main
from ndd.compress import CompressionConfig, compress
from ndd.core import EditOperation, Sentence, WeightConfig
from ndd.scoring import apply_edit, report_edit

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

BEFORE = "smith borrows mirror grandly"
AFTER = "borrows mirror grandly"


def run_cli(capsys, argv, stdin_text=None, monkeypatch=None):
    if stdin_text is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin_text))
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScore:
    def test_json_matches_golden(self, capsys):
        code, out, err = run_cli(capsys, ["score", "--before", BEFORE, "--after", AFTER, "--json"])
        assert code == 0
        assert err == ""
        assert out == (GOLDEN / "cli_score.json").read_text()

    def test_json_fields_match_library(self, capsys):
        code, out, _ = run_cli(capsys, ["score", "--before", BEFORE, "--after", AFTER, "--json"])
        assert code == 0
        payload = json.loads(out)
        plain = WeightConfig(mu=1.0, nu=1.0, balanced=False, positional=False)
        report = report_edit(NgramOracle(), Sentence.from_text(BEFORE),
                             EditOperation.deletion(1, 1), plain)
        assert payload["ndd"] == report.score
        assert payload["ppl_before"] == report.ppl_before
        assert payload["ppl_after"] == report.ppl_after
        assert payload["cosine"] == report.embedding_cosine
        assert payload["before"] == BEFORE
        assert payload["after"] == AFTER
        assert [n["position"] for n in payload["neighbors"]] == list(
            report.profile.neighbor_positions
        )

    def test_identity_edit_scores_zero(self, capsys):
        code, out, _ = run_cli(capsys, ["score", "--before", BEFORE, "--after", BEFORE])
        assert code == 0
        assert "ndd: 0.00" in out
        assert "cosine: 1.000" in out

    def test_plain_output_lines(self, capsys):
        code, out, _ = run_cli(capsys, ["score", "--before", BEFORE, "--after", AFTER])
        assert code == 0
        keys = [line.split(":")[0] for line in out.strip().splitlines()]
        assert keys == ["ndd", "ppl_before", "ppl_after", "cosine"]

    def test_verbose_prints_neighbor_table(self, capsys):
        code, out, _ = run_cli(capsys, ["score", "--before", BEFORE, "--after", AFTER, "-v"])
        assert code == 0
        assert "position" in out and "divergence" in out
        # three surviving neighbors after deleting word 1 of four
        table = [line for line in out.splitlines() if line.strip() and line.split()[0].isdigit()]
        assert len(table) == 3

    def test_explicit_edit_deletion(self, capsys):
        code, out, _ = run_cli(capsys, ["score", "--before", BEFORE, "--edit", "1:1", "--json"])
        assert code == 0
        assert json.loads(out) == json.loads((GOLDEN / "cli_score.json").read_text())

    def test_explicit_edit_replacement(self, capsys):
        code, out, _ = run_cli(
            capsys, ["score", "--before", BEFORE, "--edit", "3:3:red apple", "--json"]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["edit"] == {"start": 3, "end": 3, "replacement": ["red", "apple"]}
        assert payload["after"] == "smith borrows red apple grandly"

    def test_explicit_edit_trailing_colon_is_deletion(self, capsys):
        code, out, _ = run_cli(capsys, ["score", "--before", BEFORE, "--edit", "2:3:", "--json"])
        assert code == 0
        assert json.loads(out)["edit"]["replacement"] == []

    def test_after_and_edit_are_mutually_exclusive(self, capsys):
        code, _, err = run_cli(
            capsys, ["score", "--before", BEFORE, "--after", AFTER, "--edit", "1:1"]
        )
        assert code == 2
        assert "error:" in err
        code, _, _ = run_cli(capsys, ["score", "--before", BEFORE])
        assert code == 2

    @pytest.mark.parametrize("edit", ["2", "a:b", "0:1", "4:9", "3:2"])
    def test_bad_edit_rejected(self, capsys, edit):
        code, _, err = run_cli(capsys, ["score", "--before", BEFORE, "--edit", edit])
        assert code == 2
        assert "error:" in err

    def test_weight_flags_reach_scoring(self, capsys):
        argv = ["score", "--before", BEFORE, "--after", AFTER, "--json",
                "--mu", "0.9", "--nu", "0.9", "--balanced", "--positional"]
        code, out, _ = run_cli(capsys, argv)
        assert code == 0
        heavy = WeightConfig(mu=0.9, nu=0.9, balanced=True, positional=True)
        report = report_edit(NgramOracle(), Sentence.from_text(BEFORE),
                             EditOperation.deletion(1, 1), heavy)
        assert json.loads(out)["ndd"] == report.score

    def test_model_flag_invalid_with_toy(self, capsys):
        code, _, err = run_cli(
            capsys, ["score", "--before", BEFORE, "--after", AFTER, "--model", "some/dir"]
        )
        assert code == 2
        assert "error:" in err


class TestInferEdit:
    def check(self, before_text, after_text):
        before = Sentence.from_text(before_text)
        after = Sentence.from_text(after_text)
        edit = infer_edit(before, after)
        assert apply_edit(before, edit).words == after.words
        return edit

    def test_deletion(self):
        edit = self.check("the red cat sat", "the cat sat")
        assert (edit.start, edit.end, edit.replacement) == (2, 2, ())

    def test_replacement(self):
        edit = self.check("the red cat", "the blue cat")
        assert (edit.start, edit.end, edit.replacement) == (2, 2, ("blue",))

    def test_mid_sentence_insertion_widens_left(self):
        edit = self.check("the cat", "the big cat")
        assert (edit.start, edit.end, edit.replacement) == (1, 1, ("the", "big"))

    def test_leading_insertion_widens_right(self):
        edit = self.check("cat sat", "big cat sat")
        assert (edit.start, edit.end, edit.replacement) == (1, 1, ("big", "cat"))

    def test_identity_maps_to_trivial_replacement(self):
        edit = self.check("the cat sat", "the cat sat")
        assert (edit.start, edit.end, edit.replacement) == (1, 1, ("the",))

    def test_scattered_changes_fold_into_one_span(self):
        edit = self.check("a b c d e", "a x c y e")
        assert (edit.start, edit.end, edit.replacement) == (2, 4, ("x", "c", "y"))


class TestCompress:
    def test_stdin_to_stdout(self, capsys, monkeypatch):
        text = "smith borrows mirror grandly\ndoctor grumbles swiftly\n"
        code, out, _ = run_cli(capsys, ["compress", "--input", "-"], text, monkeypatch)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 2
        for line, source in zip(lines, text.strip().splitlines()):
            source_words = source.split()
            out_words = list(line.split())
            assert [w for w in source_words if w in out_words] == out_words  # subsequence

    def test_file_round_trip_matches_library(self, capsys, tmp_path):
        src = tmp_path / "sentences.txt"
        src.write_text(BEFORE + "\n", encoding="utf-8")
        dst = tmp_path / "out.txt"
        code, out, _ = run_cli(capsys, ["compress", "--input", str(src), "--output", str(dst)])
        assert code == 0
        assert out == ""
        trace = compress(Sentence.from_text(BEFORE), NgramOracle(), CompressionConfig())
        assert dst.read_text(encoding="utf-8") == trace.final.text() + "\n"

    def test_trace_payload_matches_library(self, capsys, monkeypatch):
        code, out, _ = run_cli(
            capsys, ["compress", "--input", "-", "--trace"], BEFORE + "\n", monkeypatch
        )
        assert code == 0
        payload = json.loads(out)
        trace = compress(Sentence.from_text(BEFORE), NgramOracle(), CompressionConfig())
        assert payload["sentence"] == BEFORE
        assert payload["compression"] == trace.final.text()
        assert payload["kept"] == list(trace.kept_indices)
        assert len(payload["iterations"]) == len(trace.iterations)
        first = payload["iterations"][0]
        assert first["input"] == BEFORE
        assert first["selected"] == [
            [c.start, c.end, c.score] for c in trace.iterations[0].selected
        ]

    def test_single_word_passes_through(self, capsys, monkeypatch):
        code, out, _ = run_cli(
            capsys, ["compress", "--input", "-", "--trace"], "hello\n", monkeypatch
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["compression"] == "hello"
        assert payload["kept"] == [1]
        assert payload["iterations"] == []

    def test_jsonl_input(self, capsys, monkeypatch):
        text = json.dumps({"sentence": BEFORE}) + "\n"
        plain_code, plain_out, _ = run_cli(
            capsys, ["compress", "--input", "-"], BEFORE + "\n", monkeypatch
        )
        jsonl_code, jsonl_out, _ = run_cli(
            capsys, ["compress", "--input", "-", "--input-format", "jsonl"], text, monkeypatch
        )
        assert plain_code == jsonl_code == 0
        assert plain_out == jsonl_out

    def test_jsonl_bad_line_rejected(self, capsys, monkeypatch):
        code, _, err = run_cli(
            capsys,
            ["compress", "--input", "-", "--input-format", "jsonl"],
            "not json\n",
            monkeypatch,
        )
        assert code == 3
        assert "invalid JSON" in err

    def test_jsonl_missing_field_rejected(self, capsys, monkeypatch):
        code, _, err = run_cli(
            capsys,
            ["compress", "--input", "-", "--input-format", "jsonl"],
            json.dumps({"text": "hi there"}) + "\n",
            monkeypatch,
        )
        assert code == 3
        assert "'sentence'" in err

    def test_missing_input_file(self, capsys):
        code, _, err = run_cli(capsys, ["compress", "--input", "no/such/file.txt"])
        assert code == 3
        assert "error:" in err

    def test_empty_input_rejected(self, capsys, monkeypatch):
        code, _, err = run_cli(capsys, ["compress", "--input", "-"], "\n\n", monkeypatch)
        assert code == 3
        assert "no sentences" in err

    def test_jobs_do_not_change_output(self, capsys, monkeypatch):
        text = "".join(
            line + "\n"
            for line in [
                "smith borrows mirror grandly",
                "scholar inspects timid shoe grandly",
                "weaver repairs table around garden",
                "duck walks across meadow",
                "doctor grumbles swiftly",
                "tailor sharpens dark song hoarsely",
            ]
        )
        _, serial, _ = run_cli(capsys, ["compress", "--input", "-"], text, monkeypatch)
        _, parallel, _ = run_cli(
            capsys, ["compress", "--input", "-", "--jobs", "8"], text, monkeypatch
        )
        assert serial == parallel

    def test_invalid_config_rejected(self, capsys, monkeypatch):
        code, _, err = run_cli(
            capsys, ["compress", "--input", "-", "--lmax", "0"], "hi there\n", monkeypatch
        )
        assert code == 2
        assert "error:" in err


class TestEvalCli:
    def test_compression_report_matches_golden(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys,
            ["eval-compression", "--data", str(FIXTURES / "compression_pairs.jsonl"),
             "--report-out", str(out_path)],
        )
        assert code == 0
        assert out_path.read_text() == (GOLDEN / "cli_eval_compression.json").read_text()
        assert "command: eval-compression" in out  # default stdout is the text view

    def test_compression_json_stdout_matches_golden(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["eval-compression", "--data", str(FIXTURES / "compression_pairs.jsonl"), "--json"],
        )
        assert code == 0
        assert out == (GOLDEN / "cli_eval_compression.json").read_text()

    def test_pruning_json_matches_golden(self, capsys):
        code, out, _ = run_cli(
            capsys, ["eval-pruning", "--conllu", str(FIXTURES / "trees.conllu"), "--json"]
        )
        assert code == 0
        assert out == (GOLDEN / "cli_eval_pruning.json").read_text()

    def test_predicates_json_matches_golden(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["eval-predicates", "--conll2009", str(FIXTURES / "predicates.conll2009"), "--json"],
        )
        assert code == 0
        assert out == (GOLDEN / "cli_eval_predicates.json").read_text()

    def test_jobs_do_not_change_report(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["eval-compression", "--data", str(FIXTURES / "compression_pairs.jsonl"),
             "--json", "--jobs", "8"],
        )
        assert code == 0
        assert out == (GOLDEN / "cli_eval_compression.json").read_text()

    def test_random_method_echoes_seed(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["eval-compression", "--data", str(FIXTURES / "compression_pairs.jsonl"),
             "--json", "--method", "random", "--seed", "3"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["config"]["method"] == "random"
        assert payload["config"]["seed"] == 3

    def test_macro_auc_flag(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["eval-predicates", "--conll2009", str(FIXTURES / "predicates.conll2009"),
             "--json", "--macro-auc"],
        )
        assert code == 0
        assert json.loads(out)["metrics"]["auc_macro"] == 1.0

    def test_text_view_has_six_decimal_metrics(self, capsys):
        code, out, _ = run_cli(
            capsys, ["eval-predicates", "--conll2009", str(FIXTURES / "predicates.conll2009")]
        )
        assert code == 0
        assert "1.000000" in out

    def test_missing_corpus_file(self, capsys):
        code, _, err = run_cli(capsys, ["eval-compression", "--data", "no/such.jsonl"])
        assert code == 3
        assert "error:" in err

    def test_ppl_scorer_rejects_ensemble_edition(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["eval-predicates", "--conll2009", str(FIXTURES / "predicates.conll2009"),
             "--scorer", "ppl", "--edition", "ensemble"],
        )
        assert code == 2
        assert "error:" in err

    def test_unknown_method_rejected_by_parser(self, capsys):
        with pytest.raises(SystemExit):
            main(["eval-compression", "--data", "x.jsonl", "--method", "oracle"])
        capsys.readouterr()


class TestBackendResolution:
    def test_bundle_needs_model_location(self, capsys, monkeypatch):
        monkeypatch.delenv("NDD_MODEL_DIR", raising=False)
        code, _, err = run_cli(
            capsys, ["score", "--before", BEFORE, "--after", AFTER, "--backend", "bundle"]
        )
        assert code == 2
        assert "NDD_MODEL_DIR" in err

    def test_bundle_env_var_is_used(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("NDD_MODEL_DIR", str(tmp_path / "missing"))
        code, _, err = run_cli(
            capsys, ["score", "--before", BEFORE, "--after", AFTER, "--backend", "bundle"]
        )
        assert code == 3
        assert "missing" in err

    def test_bundle_without_config_is_data_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            ["score", "--before", BEFORE, "--after", AFTER,
             "--backend", "bundle", "--model", str(tmp_path)],
        )
        assert code == 3
        assert "config" in err

    def test_bundle_without_model_is_backend_error(self, capsys, tmp_path):
        (tmp_path / "bundle.json").write_text(json.dumps({
            "max_len": 16,
            "hidden_size": 4,
            "lowercase": True,
            "specials": {"pad": "[PAD]", "unk": "[UNK]", "cls": "[CLS]",
                         "sep": "[SEP]", "mask": "[MASK]"},
        }))
        (tmp_path / "vocab.txt").write_text(
            "\n".join(["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "the", "cat"])
        )
        code, _, err = run_cli(
            capsys,
            ["score", "--before", BEFORE, "--after", AFTER,
             "--backend", "bundle", "--model", str(tmp_path)],
        )
        assert code == 4
        assert "error:" in err
