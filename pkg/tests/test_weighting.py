import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from echoweight.corpus import build_interaction_matrix
from echoweight.participation import compute_profiles
from echoweight.synth import SynthConfig, generate, oracle_edge_matrix, oracle_weights
from echoweight.weighting import (
    GroupCoefficients,
    GroupCounts,
    balanced_loss,
    batch_sample_weights,
    ce_loss,
    edge_reweight,
    news_weight,
    vector_norm,
    weight_vector,
)


def test_news_weight_worked_example():
    assert abs(news_weight(GroupCounts(1, 1, 2)) - 1.01) < 1e-12


def test_news_weight_zero():
    assert news_weight(GroupCounts(0, 0, 0)) == 0.0


def test_news_weight_hand_evaluated():
    assert abs(news_weight(GroupCounts(2, 0, 10)) - 1.90) < 1e-12


def test_coefficients_validated():
    with pytest.raises(ValueError):
        GroupCoefficients(lurker=-0.1)


@given(st.integers(0, 100), st.integers(0, 100), st.integers(0, 100))
def test_silence_monotonicity(l, e, c):
    base = news_weight(GroupCounts(l, e, c))
    assert news_weight(GroupCounts(l + 1, e, c)) > base
    # swapping one contributor for one lurker adds lurker - contributor credit
    if c > 0:
        swapped = news_weight(GroupCounts(l + 1, e, c - 1))
        assert abs((swapped - base) - 0.89) < 1e-9


def test_weight_vector_worked_example(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    wv = weight_vector(matrix, profiles)
    assert abs(wv.values[matrix.row_of["b"]] - 1.01) < 1e-12


def test_weight_vector_zero_matrix(network_corpus):
    network_corpus.events = []
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    wv = weight_vector(matrix, profiles)
    assert np.all(wv.values == 0)
    assert wv.norm == 1.0


def test_weight_vector_singleton_norm(network_corpus):
    network_corpus.news = [a for a in network_corpus.news if a.id == "b"]
    network_corpus.events = [e for e in network_corpus.events if e.news_id == "b"]
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    wv = weight_vector(matrix, profiles)
    assert abs(wv.norm - 1.01) < 1e-12


def test_norm_kinds():
    assert vector_norm([3.0, 4.0], "l2") == 5.0
    assert vector_norm([3.0, -4.0], "l1") == 7.0
    assert vector_norm([3.0, -4.0], "max") == 4.0
    assert vector_norm([0.0, 0.0], "l2") == 1.0
    with pytest.raises(ValueError):
        vector_norm([1.0], "l3")


def test_edge_reweight_alpha_zero_identity(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    wv = weight_vector(matrix, profiles, alpha=0.0)
    weighted = edge_reweight(matrix, wv)
    assert np.array_equal(weighted.to_dense(), matrix.to_dense())


def test_edge_reweight_single_news_doubles(network_corpus):
    network_corpus.news = [a for a in network_corpus.news if a.id == "b"]
    network_corpus.events = [e for e in network_corpus.events if e.news_id == "b"]
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    wv = weight_vector(matrix, profiles, alpha=1.0)
    row = edge_reweight(matrix, wv).row("b")
    nonzero = row[row != 0]
    assert len(nonzero) == 4
    assert np.allclose(nonzero, 2.0, atol=1e-12)


def test_edge_reweight_does_not_mutate_input(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    before = matrix.to_dense().copy()
    profiles = compute_profiles(network_corpus.users)
    edge_reweight(matrix, weight_vector(matrix, profiles, alpha=2.0))
    assert np.array_equal(matrix.to_dense(), before)


def test_edge_factors_bounded(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    for alpha in (0.0, 0.5, 1.0, 2.0):
        wv = weight_vector(matrix, profiles, alpha=alpha)
        weighted = edge_reweight(matrix, wv).to_dense()
        nonzero = weighted[weighted != 0]
        assert np.all(nonzero >= 1.0 - 1e-12)
        assert np.all(nonzero <= 2.0 ** alpha + 1e-12)


def test_batch_sample_weights_symmetry(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    factors = batch_sample_weights(["a", "a", "a"], matrix, profiles, alpha=1.0)
    assert np.all(factors == factors[0])


def test_batch_sample_weights_hand_example():
    factors = np.array([3.0, 4.0])
    norm = vector_norm(factors, "l2")
    assert norm == 5.0
    result = (1 + factors / norm) ** 1.0
    assert result == pytest.approx([1.6, 1.8])


def test_batch_sample_weights_alpha_zero(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    factors = batch_sample_weights(["a", "b", "c"], matrix, profiles, alpha=0.0)
    assert np.all(factors == 1.0)


def test_batch_sample_weights_empty_batch(network_corpus):
    matrix = build_interaction_matrix(network_corpus)
    profiles = compute_profiles(network_corpus.users)
    with pytest.raises(ValueError):
        batch_sample_weights([], matrix, profiles)


def test_ce_loss_examples():
    assert abs(ce_loss(1, 1.0)) < 1e-6
    assert ce_loss(1, 0.5) == pytest.approx(math.log(0.5))
    assert abs(ce_loss(0, 0.0)) < 1e-6
    assert ce_loss(1, 0.3) <= 0


def test_balanced_loss_sign_composition():
    assert balanced_loss([1], [0.5], [1.0]) == pytest.approx(0.6931, abs=1e-4)


def test_balanced_loss_perfect_predictions():
    assert balanced_loss([1, 0], [1.0, 0.0], [1.0, 1.0]) == pytest.approx(0.0, abs=1e-5)


def test_balanced_loss_length_mismatch():
    with pytest.raises(ValueError):
        balanced_loss([1, 0], [0.5], [1.0, 1.0])


@given(st.floats(min_value=0.1, max_value=5.0),
       st.lists(st.tuples(st.integers(0, 1), st.floats(0.01, 0.99)), min_size=1, max_size=8))
def test_balanced_loss_linear_in_constant_factor(c, pairs):
    y = [p[0] for p in pairs]
    y_hat = [p[1] for p in pairs]
    ones = [1.0] * len(pairs)
    scaled = [c] * len(pairs)
    assert balanced_loss(y, y_hat, scaled) == pytest.approx(c * balanced_loss(y, y_hat, ones))


def test_brute_force_equivalence_small_corpora():
    # naive recomputation over all (news, user) pairs must agree exactly
    for seed in range(8):
        cfg = SynthConfig(n_news=8, n_users=16, seed=seed,
                          interact_prob={"E": (0.4, 0.4), "C": (0.8, 0.8)},
                          lurker_signal=0.6)
        corpus, _ = generate(cfg)
        profiles = compute_profiles(corpus.users)
        matrix = build_interaction_matrix(corpus)
        for alpha in (0.5, 1.0):
            wv = weight_vector(matrix, profiles, alpha=alpha)
            ov = oracle_weights(corpus, profiles, alpha=alpha)
            assert np.array_equal(wv.values, ov.values)
            assert wv.norm == ov.norm
            assert np.array_equal(
                edge_reweight(matrix, wv).to_dense(),
                oracle_edge_matrix(corpus, profiles, alpha=alpha),
            )
