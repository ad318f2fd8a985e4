import os

os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
os.environ.setdefault("TRANSFORMERS_VERBOSITY", "error")

import json

import pytest
import torch
from transformers import BertConfig, BertForMaskedLM, BertTokenizer

from ndd_export import Probe, export_bundle

TINY_VOCAB = (
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "in", "walk", "##ing", "rain", "cold", "smith",
    "borrow", "##s", "mirror", "grand", "##ly", "duck", "cross",
    "meadow", "garden", "table", "repair", "weaver", "doctor",
    "scholar", "shoe", "timid", "inspect", "song", "dark", "tailor",
    "sharp", "##en", "hoarse", "swift", "grumble", "around", "across",
)

# Sentences over the tiny vocabulary (unknown words are fine, they become
# the unknown token on both sides), each with the 1-based word to mask.
_PROBE_TEXTS = (
    ("the smith borrows a mirror", 3),
    ("a duck walks across the meadow", 2),
    ("the weaver repairs a table", 4),
    ("the doctor grumbles swiftly", 3),
    ("a scholar inspects the timid shoe", 3),
    ("the tailor sharpens a dark song", 2),
    ("rain falls around the garden", 1),
    ("the duck crossing the cold garden", 3),
    ("a mirror in the dark garden", 2),
    ("the smith walks in the rain", 5),
    ("a timid doctor inspects the shoe", 6),
    ("the weaver grumbles in the garden", 1),
    ("a swift duck walks across the table", 4),
    ("the scholar borrows a grand mirror", 5),
    ("cold rain around the meadow", 2),
    ("the tailor walks across a garden", 6),
    ("a hoarse song in the garden", 2),
    ("the grand table in the garden", 3),
)


def build_checkpoint(directory, vocab=TINY_VOCAB, vocab_size=None, mask_token=None, seed=11):
    """Save a tiny randomly initialized masked LM plus tokenizer to a directory."""
    directory.mkdir(parents=True, exist_ok=True)
    vocab_path = directory / "tokens.txt"
    vocab_path.write_text("\n".join(vocab) + "\n", encoding="utf-8")
    extra = {"mask_token": mask_token} if mask_token else {}
    tokenizer = BertTokenizer(str(vocab_path), do_lower_case=True, **extra)
    config = BertConfig(
        vocab_size=vocab_size if vocab_size is not None else len(tokenizer.get_vocab()),
        hidden_size=16,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=32,
    )
    torch.manual_seed(seed)
    model = BertForMaskedLM(config).eval()
    checkpoint = directory / "checkpoint"
    model.save_pretrained(checkpoint)
    tokenizer.save_pretrained(checkpoint)
    return checkpoint


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    return build_checkpoint(tmp_path_factory.mktemp("tiny-mlm"))


@pytest.fixture()
def make_checkpoint(tmp_path):
    def build(name="alt", **kwargs):
        return build_checkpoint(tmp_path / name, **kwargs)

    return build


@pytest.fixture(scope="session")
def probes():
    return tuple(Probe(tuple(text.split()), mask) for text, mask in _PROBE_TEXTS)


@pytest.fixture(scope="session")
def probes_file(probes, tmp_path_factory):
    path = tmp_path_factory.mktemp("probes") / "probes.json"
    payload = [{"words": list(p.words), "mask_word": p.mask_word} for p in probes]
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def bundle(checkpoint, probes, tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle") / "tiny"
    return export_bundle(checkpoint, out, probes, emit_graph=False)


@pytest.fixture(scope="session")
def reloaded(checkpoint):
    from transformers import AutoModelForMaskedLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    model = AutoModelForMaskedLM.from_pretrained(checkpoint).eval()
    return model, tokenizer
