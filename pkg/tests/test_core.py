"""Tests for the pure scoring math: divergence, weights, aggregation."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndd.core import (
    PROB_FLOOR,
    DivergenceProfile,
    EditKind,
    EditOperation,
    Sentence,
    VocabDistribution,
    WeightConfig,
    balanced_distance_weights,
    distance_weights,
    kl_divergence,
    ndd,
    neighbor_positions,
    position_weights,
    stable_vocab_id,
)
from ndd.errors import DimensionMismatchError, VocabMismatchError

GOLDEN = Path(__file__).parent / "golden"


def dist(values, vocab_id="test-vocab"):
    return VocabDistribution.from_weights(np.asarray(values, dtype=np.float64), vocab_id)


positive_weight_vectors = st.lists(
    st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False),
    min_size=2,
    max_size=64,
)


# ---------------------------------------------------------------- Sentence


def test_sentence_from_text_round_trip():
    s = Sentence.from_text("the cat sat down")
    assert s.words == ("the", "cat", "sat", "down")
    assert s.text() == "the cat sat down"
    assert len(s) == 4


def test_sentence_rejects_empty():
    with pytest.raises(ValueError):
        Sentence(())


def test_sentence_rejects_blank_or_spaced_words():
    with pytest.raises(ValueError):
        Sentence(("ok", ""))
    with pytest.raises(ValueError):
        Sentence(("two words",))


# ---------------------------------------------------------- EditOperation


def test_deletion_factory_is_empty_replacement():
    e = EditOperation.deletion(2, 3)
    assert e.kind is EditKind.DELETION
    assert e.replacement == ()
    assert e.span_length() == 2


def test_replacement_factory():
    e = EditOperation.replace(1, 1, ["that"])
    assert e.kind is EditKind.REPLACEMENT
    assert e.replacement == ("that",)


def test_edit_kind_must_match_replacement_arity():
    with pytest.raises(ValueError):
        EditOperation(EditKind.DELETION, 1, 1, ("word",))
    with pytest.raises(ValueError):
        EditOperation(EditKind.REPLACEMENT, 1, 1, ())


def test_edit_rejects_bad_span():
    with pytest.raises(ValueError):
        EditOperation.deletion(0, 1)
    with pytest.raises(ValueError):
        EditOperation.deletion(3, 2)


def test_edit_validate_for_checks_sentence_length():
    e = EditOperation.deletion(2, 5)
    e.validate_for(Sentence.from_text("a b c d e"))
    with pytest.raises(ValueError):
        e.validate_for(Sentence.from_text("a b c"))


# ------------------------------------------------------ VocabDistribution


def test_from_weights_normalizes_and_floors():
    d = dist([1.0, 3.0])
    assert d.probabilities == pytest.approx([0.25, 0.75])
    assert d.probabilities.min() >= PROB_FLOOR
    assert d.probabilities.sum() == pytest.approx(1.0, abs=1e-9)


def test_from_weights_rejects_bad_input():
    with pytest.raises(ValueError):
        dist([1.0, -1.0])
    with pytest.raises(ValueError):
        dist([0.0, 0.0])
    with pytest.raises(ValueError):
        VocabDistribution.from_weights(np.ones((2, 2)), "v")
    with pytest.raises(ValueError):
        VocabDistribution.from_weights(np.array([]), "v")


def test_direct_init_enforces_floor_and_sum():
    with pytest.raises(ValueError):
        VocabDistribution(np.array([1.0, 0.0]), "v")
    with pytest.raises(ValueError):
        VocabDistribution(np.array([0.6, 0.6]), "v")


def test_from_logits_matches_manual_softmax():
    logits = np.array([0.3, -1.2, 2.0, 0.0])
    d = VocabDistribution.from_logits(logits, "v")
    e = np.exp(logits - logits.max())
    assert d.probabilities == pytest.approx(e / e.sum(), abs=1e-12)


def test_from_logits_shift_invariant():
    logits = np.array([0.5, 1.5, -0.5])
    a = VocabDistribution.from_logits(logits, "v")
    b = VocabDistribution.from_logits(logits + 123.0, "v")
    assert a.probabilities == pytest.approx(b.probabilities, abs=1e-12)


def test_probabilities_are_read_only():
    d = dist([1.0, 1.0])
    with pytest.raises(ValueError):
        d.probabilities[0] = 0.9


# --------------------------------------------------------- kl_divergence


def test_kl_two_outcome_example():
    # 0.9*ln(0.9/0.5) + 0.1*ln(0.1/0.5)
    before = dist([0.5, 0.5])
    after = dist([0.9, 0.1])
    assert kl_divergence(after, before) == pytest.approx(0.368064, abs=1e-5)


def test_kl_peaked_vs_uniform_example():
    before = dist([0.25, 0.25, 0.25, 0.25])
    after = dist([0.97, 0.01, 0.01, 0.01])
    assert kl_divergence(after, before) == pytest.approx(1.21860, abs=1e-4)


def test_kl_identity_is_exactly_zero():
    d = dist([0.2, 0.3, 0.5])
    assert kl_divergence(d, d) == 0.0


def test_kl_is_asymmetric():
    a = dist([0.9, 0.1])
    b = dist([0.5, 0.5])
    assert kl_divergence(a, b) != pytest.approx(kl_divergence(b, a), abs=1e-3)


def test_kl_vocab_mismatch():
    with pytest.raises(VocabMismatchError):
        kl_divergence(dist([1, 1], "va"), dist([1, 1], "vb"))


def test_kl_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        kl_divergence(dist([1, 1], "shared"), dist([1, 1, 1], "shared"))


@given(positive_weight_vectors, positive_weight_vectors)
def test_kl_nonnegative_and_matches_loop_oracle(wa, wb):
    m = min(len(wa), len(wb))
    a = dist(wa[:m])
    b = dist(wb[:m])
    got = kl_divergence(a, b)
    want = math.fsum(
        float(p) * math.log(float(p) / float(q))
        for p, q in zip(a.probabilities, b.probabilities)
    )
    assert got >= 0.0
    assert got == pytest.approx(max(0.0, want), abs=1e-9)


# ---------------------------------------------------- neighbor_positions


def test_neighbor_positions_splits_around_span():
    assert neighbor_positions(8, 3, 5) == [1, 2, 6, 7, 8]
    assert neighbor_positions(4, 1, 2) == [3, 4]
    assert neighbor_positions(4, 3, 4) == [1, 2]
    assert neighbor_positions(3, 1, 3) == []


def test_neighbor_positions_rejects_bad_span():
    for n, i, j in [(5, 0, 2), (5, 3, 2), (5, 2, 6), (0, 1, 1)]:
        with pytest.raises(ValueError):
            neighbor_positions(n, i, j)


# ------------------------------------------------------ distance_weights


def test_distance_weights_pinned_example():
    # n=8, span [3,5], mu=0.9: k -> mu**min(|k-3|, |k-5|)
    w = distance_weights(8, 3, 5, 0.9)
    assert list(w) == pytest.approx([0.81, 0.9, 0.9, 0.81, 0.729], abs=1e-12)


def test_distance_weights_two_word_sentence():
    assert list(distance_weights(2, 1, 1, 0.5)) == pytest.approx([0.5])


def test_distance_weights_mu_one_is_flat():
    assert list(distance_weights(7, 2, 3, 1.0)) == [1.0] * 5


def test_distance_weights_rejects_bad_mu():
    for mu in (0.0, -0.1, 1.0001):
        with pytest.raises(ValueError):
            distance_weights(5, 2, 2, mu)


@given(
    st.integers(min_value=2, max_value=40),
    st.data(),
    st.floats(min_value=0.05, max_value=1.0),
)
def test_distance_weights_match_loop_oracle(n, data, mu):
    i = data.draw(st.integers(min_value=1, max_value=n))
    j = data.draw(st.integers(min_value=i, max_value=n))
    w = distance_weights(n, i, j, mu)
    ks = [k for k in range(1, n + 1) if k < i or k > j]
    assert len(w) == len(ks)
    for got, k in zip(w, ks):
        assert got == pytest.approx(mu ** min(abs(k - i), abs(k - j)), abs=1e-12)


# --------------------------------------------- balanced_distance_weights


def test_balanced_weights_mu_one_doubles():
    w = balanced_distance_weights(9, 4, 5, 1.0)
    assert list(w) == [2.0] * 7


def test_balanced_weights_golden():
    golden = json.loads((GOLDEN / "balanced_weights_n6_i3_j4.json").read_text())
    w = balanced_distance_weights(golden["n"], golden["i"], golden["j"], golden["mu"])
    assert list(w) == pytest.approx(golden["weights"], abs=1e-12)
    # hand check: base [mu^2, mu, mu, mu^2] scaled by (1 + mu^4) = 1.6561
    assert list(w) == pytest.approx([1.341441, 1.49049, 1.49049, 1.341441], abs=1e-9)


def test_balanced_weights_asymmetric_hand_case():
    # n=6, span [2,3], mu=0.9: base [mu, mu, mu^2, mu^3], mirror adds
    # base[::-1] * mu^4.
    mu = 0.9
    w = balanced_distance_weights(6, 2, 3, mu)
    want = [mu + mu**7, mu + mu**6, mu**2 + mu**5, mu**3 + mu**5]
    assert list(w) == pytest.approx(want, abs=1e-12)


def test_balanced_weights_full_span_empty():
    assert balanced_distance_weights(5, 1, 5, 0.9).size == 0


@given(
    st.integers(min_value=2, max_value=30),
    st.data(),
    st.floats(min_value=0.05, max_value=1.0),
)
def test_balanced_weights_match_loop_oracle(n, data, mu):
    i = data.draw(st.integers(min_value=1, max_value=n))
    j = data.draw(st.integers(min_value=i, max_value=n))
    base = distance_weights(n, i, j, mu)
    w = balanced_distance_weights(n, i, j, mu)
    n_prime = len(base)
    for k in range(n_prime):
        want = base[k] + base[n_prime - 1 - k] * mu**n_prime
        assert w[k] == pytest.approx(want, abs=1e-12)


# ------------------------------------------------------ position_weights


def test_position_weights_pinned_values():
    w = position_weights([1, 2, 10], 0.9)
    assert list(w) == pytest.approx([0.9, 0.81, 0.3486784401], abs=1e-12)


def test_position_weights_nu_one_is_flat():
    assert list(position_weights([1, 5, 9], 1.0)) == [1.0, 1.0, 1.0]


def test_position_weights_rejects_non_positive_positions():
    with pytest.raises(ValueError):
        position_weights([1, 0], 0.9)


def test_position_weights_rejects_bad_nu():
    with pytest.raises(ValueError):
        position_weights([1], 0.0)


# --------------------------------------------------------- WeightConfig


def test_weight_config_defaults():
    cfg = WeightConfig()
    assert cfg.mu == 0.9
    assert cfg.nu == 0.9
    assert cfg.balanced is False
    assert cfg.positional is False


def test_weight_config_validates_decays():
    with pytest.raises(ValueError):
        WeightConfig(mu=0.0)
    with pytest.raises(ValueError):
        WeightConfig(nu=1.5)


def test_weight_config_plain_equals_distance_weights():
    cfg = WeightConfig(mu=0.7)
    assert list(cfg.weights_for_span(8, 3, 5)) == pytest.approx(
        list(distance_weights(8, 3, 5, 0.7))
    )


def test_weight_config_balanced_flag():
    cfg = WeightConfig(mu=0.7, balanced=True)
    assert list(cfg.weights_for_span(8, 3, 5)) == pytest.approx(
        list(balanced_distance_weights(8, 3, 5, 0.7))
    )


def test_weight_config_positional_flag_multiplies():
    cfg = WeightConfig(mu=0.8, nu=0.6, positional=True)
    base = distance_weights(8, 3, 5, 0.8)
    pos = position_weights(neighbor_positions(8, 3, 5), 0.6)
    assert list(cfg.weights_for_span(8, 3, 5)) == pytest.approx(list(base * pos))


def test_weight_config_both_flags():
    cfg = WeightConfig(mu=0.8, nu=0.6, balanced=True, positional=True)
    base = balanced_distance_weights(8, 3, 5, 0.8)
    pos = position_weights(neighbor_positions(8, 3, 5), 0.6)
    assert list(cfg.weights_for_span(8, 3, 5)) == pytest.approx(list(base * pos))


# ---------------------------------------------------- DivergenceProfile


def test_profile_valid_construction():
    p = DivergenceProfile((1, 2), (0.5, 0.25), (1.0, 2.0), 1.0)
    assert p.recomputed_score() == pytest.approx(1.0)


def test_profile_rejects_score_mismatch():
    with pytest.raises(ValueError):
        DivergenceProfile((1,), (0.5,), (1.0,), 0.75)


def test_profile_rejects_negative_entries():
    with pytest.raises(ValueError):
        DivergenceProfile((1,), (-0.1,), (1.0,), -0.1)
    with pytest.raises(ValueError):
        DivergenceProfile((1,), (0.1,), (-1.0,), -0.1)


def test_profile_rejects_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        DivergenceProfile((1, 2), (0.5,), (1.0,), 0.5)


def test_profile_empty_scores_zero():
    assert DivergenceProfile((), (), (), 0.0).score == 0.0


# ------------------------------------------------------------------ ndd


def test_ndd_pinned_dot_product_example():
    # KLs {0.368064, 0} with weights {0.9, 0.81} -> 0.331258
    u = dist([1, 1, 1, 1])
    before = [dist([0.5, 0.5]), u]
    after = [dist([0.9, 0.1]), u]
    profile = ndd(before, after, [0.9, 0.81])
    assert profile.score == pytest.approx(0.331258, abs=1e-5)
    assert profile.divergences[1] == 0.0
    assert profile.neighbor_positions == (1, 2)


def test_ndd_identity_is_exactly_zero():
    ds = [dist([1, 2, 3]), dist([5, 1, 1]), dist([1, 1, 1])]
    profile = ndd(ds, ds, [0.9, 1.0, 0.81])
    assert profile.score == 0.0
    assert profile.divergences == (0.0, 0.0, 0.0)


def test_ndd_empty_inputs_score_zero():
    assert ndd([], [], []).score == 0.0


def test_ndd_rejects_length_mismatch():
    d = dist([1, 1])
    with pytest.raises(DimensionMismatchError):
        ndd([d], [d, d], [1.0, 1.0])
    with pytest.raises(DimensionMismatchError):
        ndd([d], [d], [1.0, 1.0])
    with pytest.raises(DimensionMismatchError):
        ndd([d], [d], [1.0], positions=[1, 2])


def test_ndd_carries_positions_metadata():
    d = dist([1, 1])
    profile = ndd([d, d], [d, d], [1.0, 1.0], positions=[4, 7])
    assert profile.neighbor_positions == (4, 7)


@given(st.lists(positive_weight_vectors, min_size=1, max_size=6), st.data())
@settings(max_examples=50)
def test_ndd_score_matches_weighted_fsum(rows, data):
    size = min(len(r) for r in rows)
    before = [dist(r[:size]) for r in rows]
    after = [dist(data.draw(positive_weight_vectors)[:size] or [1.0] * size) for _ in rows]
    after = [a if len(a) == size else dist([1.0] * size) for a in after]
    weights = [data.draw(st.floats(min_value=0.0, max_value=2.0)) for _ in rows]
    profile = ndd(before, after, weights)
    want = math.fsum(d * w for d, w in zip(profile.divergences, weights))
    assert profile.score == pytest.approx(want, abs=1e-9)
    assert profile.score >= 0.0


# ------------------------------------------------------ stable_vocab_id


def test_stable_vocab_id_format_and_determinism():
    tokens = ["[PAD]", "[UNK]", "cat"]
    vid = stable_vocab_id(tokens)
    assert vid == stable_vocab_id(list(tokens))
    assert vid.startswith("v3-")
    assert len(vid.split("-")[1]) == 12


def test_stable_vocab_id_is_order_sensitive():
    assert stable_vocab_id(["a", "b"]) != stable_vocab_id(["b", "a"])
