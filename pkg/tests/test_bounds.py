import math

import numpy as np
import pytest

from synchan.bounds import (
    ChannelParams,
    capacity_expansion_constant,
    capacity_expansion_deletion,
    deletion_awgn_bound,
    deletion_bound,
    deletion_bound_small_p,
    deletion_small_p_coefficients,
    deletion_substitution_bound,
    evaluate_bound,
    gallager_bound,
    insertion_small_p_coefficients,
    optimize_block_length,
    random_insertion_bound,
    random_insertion_bound_small_p,
)
from synchan.numerics import awgn_expectation, binary_entropy

from helpers import brute_mean_pattern_log_weight


class TestChannelParams:
    def test_constructors_zero_other_fields(self):
        assert ChannelParams.deletion(0.2) == ChannelParams(p_d=0.2)
        assert ChannelParams.insertion(0.2) == ChannelParams(p_i=0.2)
        assert ChannelParams.deletion_awgn(0.1, 2.0) == ChannelParams(p_d=0.1, sigma=2.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(p_d=1.2)
        with pytest.raises(ValueError):
            ChannelParams(p_d=0.6, p_i=0.6)
        with pytest.raises(ValueError):
            ChannelParams(sigma=-0.1)


class TestGallagerBound:
    def test_perfect_channel(self):
        assert gallager_bound(ChannelParams()).rate == 1.0

    def test_insertion_only_reference(self):
        rate = gallager_bound(ChannelParams.insertion(0.10)).rate
        assert rate == pytest.approx(0.5310, abs=5e-5)

    def test_deletion_substitution_reference(self):
        rate = gallager_bound(ChannelParams.deletion_substitution(0.05, 0.03)).rate
        assert rate == pytest.approx(0.5289, abs=5e-5)


class TestDeletionSubstitutionBound:
    def test_reference_cells(self):
        assert deletion_substitution_bound(1000, 0.01, 0.01).rate == pytest.approx(0.8419, abs=5e-4)
        assert deletion_substitution_bound(100, 0.1, 0.1).rate == pytest.approx(0.1222, abs=5e-4)

    def test_error_free_channel(self):
        assert deletion_substitution_bound(37, 0.0, 0.0).rate == 1.0

    def test_improvement_over_gallager(self):
        # the gain over the gallager value is the pattern term minus p_d,
        # independent of p_e
        for n in (10, 100):
            for p_d in (1e-4, 0.01, 0.1, 0.3, 0.5):
                for p_e in (0.0, 0.05, 0.2):
                    ours = deletion_substitution_bound(n, p_d, p_e)
                    base = gallager_bound(ChannelParams.deletion_substitution(p_d, p_e)).rate
                    gain = ours.components["pattern_gain"] - p_d
                    assert ours.rate - base == pytest.approx(gain, abs=1e-12)

    def test_improvement_sign(self):
        # positive throughout the tabulated regime; the often-quoted claim
        # that it is always positive fails for large deletion probabilities
        for n in (100, 1000):
            for p_d in (1e-4, 1e-3, 0.01, 0.05, 0.1):
                gain = deletion_substitution_bound(n, p_d, 0.0).components["pattern_gain"] - p_d
                assert gain > 0.0
        flipped = deletion_substitution_bound(1000, 0.3, 0.0).components["pattern_gain"] - 0.3
        assert flipped < 0.0

    def test_monotone_in_substitution_probability(self):
        rates = [deletion_substitution_bound(50, 0.05, p_e).rate for p_e in np.linspace(0, 0.5, 11)]
        assert all(a >= b - 1e-12 for a, b in zip(rates, rates[1:]))


class TestDeletionBound:
    def test_reference_loss(self):
        # the reference loss 1.1302e-2 is quoted at p_e = 1e-5; the deletion-only
        # value sits below it by exactly the substitution penalty (about 1.6%
        # here, so the p_e term is not negligible at the 1% level)
        with_subst = deletion_substitution_bound(1000, 0.001, 1e-5)
        assert 1.0 - with_subst.rate == pytest.approx(1.1302e-2, rel=0.01)
        deletion_only = deletion_bound(1000, 0.001)
        penalty = with_subst.components["substitution_penalty"]
        assert deletion_only.rate == pytest.approx(with_subst.rate - penalty, abs=1e-15)
        assert 1.0 - deletion_only.rate == pytest.approx(1.1122e-2, rel=0.01)

    def test_no_deletions(self):
        assert deletion_bound(123, 0.0).rate == 1.0

    def test_small_p_relaxation_stays_below(self):
        for n in (4, 10, 50):
            for p in np.linspace(0.0, 0.2, 41):
                assert (
                    deletion_bound_small_p(n, float(p)).rate
                    <= deletion_bound(n, float(p)).rate + 1e-12
                )

    def test_small_p_polynomial_against_enumerated_weights(self):
        w1 = brute_mean_pattern_log_weight(10, 1)
        w2 = brute_mean_pattern_log_weight(10, 2)
        p = 0.01
        direct = (
            1.0
            - binary_entropy(p)
            + p * (w1 - 1.0)
            + p**2 * 4.5 * (w2 - 2 * w1)
            + p**3 * math.comb(9, 2) * (w1 - w2)
            - p**4 * math.comb(9, 3) * w1
        )
        assert deletion_bound_small_p(10, p).rate == pytest.approx(direct, abs=1e-12)
        c = deletion_small_p_coefficients(10)
        assert c[0] == pytest.approx(w1 - 1.0, abs=1e-10)

    def test_small_p_requires_n_of_4(self):
        with pytest.raises(ValueError):
            deletion_bound_small_p(3, 0.01)


class TestDeletionAwgnBound:
    def test_noiseless_reduces_to_deletion(self):
        assert deletion_awgn_bound(60, 0.05, 0.0).rate == deletion_bound(60, 0.05).rate

    def test_deletion_free_is_biawgn_capacity(self):
        for sigma in (0.25, 0.5, 1.0, 2.0):
            rate = deletion_awgn_bound(100, 0.0, sigma).rate
            assert abs(rate - (1.0 - awgn_expectation(sigma))) <= 1e-12

    def test_exact_component_decomposition(self):
        # the AWGN penalty is exactly (1 - p_d) times the expectation term
        result = deletion_awgn_bound(50, 0.1, 0.8)
        assert result.components["awgn_penalty"] == -(1 - 0.1) * awgn_expectation(0.8)
        assert result.rate == pytest.approx(
            deletion_bound(50, 0.1).rate - (1 - 0.1) * awgn_expectation(0.8), abs=1e-15
        )

    def test_monotone_in_noise_and_deletions(self):
        sig_rates = [deletion_awgn_bound(50, 0.05, s).rate for s in (0.1, 0.3, 0.6, 1.0, 2.0)]
        assert all(a > b for a, b in zip(sig_rates, sig_rates[1:]))
        pd_rates = [deletion_awgn_bound(50, p, 0.5).rate for p in (0.0, 0.05, 0.1, 0.2, 0.4)]
        assert all(a > b for a, b in zip(pd_rates, pd_rates[1:]))


class TestRandomInsertionBound:
    def test_reference_cells(self):
        assert random_insertion_bound(5, 0.05).rate == pytest.approx(0.7442, abs=5e-4)
        assert random_insertion_bound(4, 0.10).rate == pytest.approx(0.5702, abs=5e-4)

    def test_tiny_probability_loss(self):
        loss = 1.0 - random_insertion_bound(121, 1e-6).rate
        assert loss == pytest.approx(2.007e-5, rel=0.01)

    def test_crossover_against_gallager(self):
        ours = random_insertion_bound(3, 0.25).rate
        base = gallager_bound(ChannelParams.insertion(0.25)).rate
        assert ours == pytest.approx(0.1853, abs=5e-4)
        assert base == pytest.approx(0.1887, abs=5e-4)
        assert ours < base

    def test_error_free_channel(self):
        assert random_insertion_bound(9, 0.0).rate == 1.0

    def test_requires_two_bits(self):
        with pytest.raises(ValueError):
            random_insertion_bound(1, 0.1)


class TestInsertionSmallP:
    def test_reference_coefficients(self):
        c1, c2, c3, c4 = insertion_small_p_coefficients(10)
        assert c1 == pytest.approx(1.1591, rel=5e-3)
        assert c2 == pytest.approx(-30.7184, rel=5e-3)
        assert c3 == pytest.approx(1.0502e2, rel=5e-3)
        assert c4 == pytest.approx(-1.3391e3, rel=5e-3)

    def test_error_free_channel(self):
        assert random_insertion_bound_small_p(12, 0.0).rate == 1.0

    def test_stays_below_full_bound(self):
        for n in (5, 6, 10, 20, 50):
            for p in np.linspace(0.0, 0.1, 41):
                assert (
                    random_insertion_bound_small_p(n, float(p)).rate
                    <= random_insertion_bound(n, float(p)).rate + 1e-12
                )


class TestOptimizeBlockLength:
    def test_insertion_optima(self):
        n_star, best = optimize_block_length("random_insertion", ChannelParams.insertion(0.03), 512)
        assert n_star == 5
        assert best.rate == pytest.approx(0.8276, abs=5e-4)
        n_star, _ = optimize_block_length("random_insertion", ChannelParams.insertion(0.20), 512)
        assert n_star == 3

    def test_longer_blocks_tighter_for_deletion_substitution(self):
        long_rate = deletion_substitution_bound(1000, 0.01, 0.01).rate
        short_rate = deletion_substitution_bound(100, 0.01, 0.01).rate
        assert long_rate >= short_rate
        assert long_rate == pytest.approx(0.8419, abs=5e-4)
        assert short_rate == pytest.approx(0.8418, abs=5e-4)

    def test_argmax_definition(self):
        params = ChannelParams.insertion(0.08)
        n_star, best = optimize_block_length("random_insertion", params, 64)
        for n in range(3, 65):
            assert best.rate >= random_insertion_bound(n, 0.08).rate

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            optimize_block_length("nonsense", ChannelParams(), 16)


class TestCapacityExpansion:
    def test_partial_sums_cauchy(self):
        s100 = capacity_expansion_constant(100)
        s200 = capacity_expansion_constant(200)
        s500 = capacity_expansion_constant(500)
        assert abs(s200 - s100) < 1e-12
        assert abs(s500 - s200) < 1e-14

    def test_independent_summation(self):
        series = math.fsum(2.0 ** (-l - 1) * l * math.log2(l) for l in range(2, 501))
        reference = math.log2(2.0 * math.e) - series
        assert capacity_expansion_constant() == pytest.approx(reference, abs=1e-12)

    def test_perfect_channel_limit(self):
        assert capacity_expansion_deletion(1e-9) == pytest.approx(1.0, abs=1e-6)

    def test_sits_just_above_the_bound(self):
        for p in (1e-5, 1e-4, 1e-3):
            gap = capacity_expansion_deletion(p) - deletion_bound(1000, p).rate
            assert 0.0 < gap / p < 0.01

    def test_domain(self):
        with pytest.raises(ValueError):
            capacity_expansion_deletion(0.0)


class TestBoundResultInvariants:
    CASES = [
        ("gallager", ChannelParams(p_d=0.05, p_e=0.02, p_i=0.01), None),
        ("deletion", ChannelParams.deletion(0.07), 40),
        ("deletion_substitution", ChannelParams.deletion_substitution(0.07, 0.02), 40),
        ("deletion_awgn", ChannelParams.deletion_awgn(0.07, 0.8), 40),
        ("random_insertion", ChannelParams.insertion(0.07), 40),
        ("deletion_small_p", ChannelParams.deletion(0.02), 40),
        ("random_insertion_small_p", ChannelParams.insertion(0.02), 40),
    ]

    @pytest.mark.parametrize("method,params,n", CASES)
    def test_rate_is_component_sum_and_at_most_one(self, method, params, n):
        result = evaluate_bound(method, params, n)
        assert result.rate == math.fsum(result.components.values())
        assert result.rate <= 1.0 + 1e-12
        assert result.method == method

    @pytest.mark.parametrize(
        "method,n", [(m, n) for m, _, n in CASES]
    )
    def test_error_free_rate_is_one(self, method, n):
        assert evaluate_bound(method, ChannelParams(), n).rate == pytest.approx(1.0, abs=1e-12)


def test_evaluate_bound_requires_block_length():
    with pytest.raises(ValueError):
        evaluate_bound("deletion", ChannelParams.deletion(0.1))
