import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from ainorms import (
    DynamicsConfig,
    GamePayoffs,
    ParameterError,
    average_payoffs,
    baseline_matrix,
    BaselineParams,
    fermi_probability,
    fixation_probability,
    log_fixation_probability,
    transition_rates,
)
from helpers import fixation_naive

# Frozen before the build by evaluating the literal product-sum oracle
# (helpers.fixation_naive) on [[1, .5], [.5, 1]], N=4, beta=1, mutant 0.
RHO_BASELINE_N4_BETA1 = 0.20871489676884264

BASELINE_GAME = baseline_matrix(BaselineParams(
    learning_benefit=2.0, effort_cost=1.0, shortterm_advantage=1.0,
    legitimacy_cost=0.5))


def random_game(n, elements=st.floats(min_value=-5, max_value=5, allow_nan=False)):
    return hnp.arrays(np.float64, (n, n), elements=elements).map(
        lambda m: GamePayoffs(tuple(f"s{k}" for k in range(n)), m))


games = st.integers(min_value=2, max_value=4).flatmap(random_game)


class TestDynamicsConfig:
    def test_validation(self):
        DynamicsConfig(2, 0.0)
        with pytest.raises(ParameterError):
            DynamicsConfig(1, 0.1)
        with pytest.raises(ParameterError):
            DynamicsConfig(10, -0.1)
        with pytest.raises(ParameterError):
            DynamicsConfig(10, 0.1, mutation_rate=1.5)


class TestAveragePayoffs:
    def test_single_opponent(self):
        pair = average_payoffs(BASELINE_GAME, 0, 1, k=1, N=2)
        assert pair.pi_i == BASELINE_GAME.matrix[0, 1]
        assert pair.pi_j == BASELINE_GAME.matrix[1, 0]

    @given(v=st.floats(min_value=-5, max_value=5, allow_nan=False),
           N=st.integers(min_value=2, max_value=50),
           data=st.data())
    def test_uniform_payoffs_average_to_the_constant(self, v, N, data):
        game = GamePayoffs(("A", "B"), np.full((2, 2), v))
        k = data.draw(st.integers(min_value=1, max_value=N - 1))
        pair = average_payoffs(game, 0, 1, k, N)
        assert pair.pi_i == pytest.approx(v, abs=1e-12)
        assert pair.pi_j == pytest.approx(v, abs=1e-12)

    def test_hand_evaluated_mix(self):
        pair = average_payoffs(BASELINE_GAME, 0, 1, k=2, N=4)
        assert pair.pi_i == pytest.approx(2 / 3, abs=1e-15)
        assert pair.pi_j == pytest.approx(2 / 3, abs=1e-15)

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            average_payoffs(BASELINE_GAME, 0, 1, k=0, N=4)
        with pytest.raises(ParameterError):
            average_payoffs(BASELINE_GAME, 0, 1, k=4, N=4)
        with pytest.raises(ParameterError):
            average_payoffs(BASELINE_GAME, 1, 1, k=2, N=4)


class TestFermiProbability:
    def test_equal_payoffs_give_half(self):
        assert fermi_probability(1.7, 1.7, 3.0) == 0.5

    def test_neutral_beta_gives_half(self):
        assert fermi_probability(-4.0, 9.0, 0.0) == 0.5

    def test_direct_evaluation(self):
        assert fermi_probability(0.0, 10.0, 0.1) == pytest.approx(
            1 / (1 + math.exp(-1)), rel=1e-15)

    def test_negative_beta_rejected(self):
        with pytest.raises(ParameterError):
            fermi_probability(0.0, 1.0, -0.5)

    def test_saturates_without_overflow(self):
        hi = fermi_probability(0.0, 1e6, 10.0)
        lo = fermi_probability(1e6, 0.0, 10.0)
        assert 0 < lo < 1e-300 and hi == 1.0

    @given(x=st.floats(min_value=-50, max_value=50, allow_nan=False),
           y=st.floats(min_value=-50, max_value=50, allow_nan=False),
           beta=st.floats(min_value=0, max_value=5, allow_nan=False))
    def test_complementarity(self, x, y, beta):
        total = fermi_probability(x, y, beta) + fermi_probability(y, x, beta)
        assert total == pytest.approx(1.0, abs=1e-12)

    @given(d1=st.floats(min_value=-20, max_value=20, allow_nan=False),
           d2=st.floats(min_value=-20, max_value=20, allow_nan=False))
    def test_monotone_in_payoff_gain(self, d1, d2):
        lo, hi = sorted((d1, d2))
        assert fermi_probability(0.0, lo, 0.7) <= fermi_probability(0.0, hi, 0.7)


class TestTransitionRates:
    def test_neutral_drift(self):
        for m in (1, 2, 3):
            t_plus, t_minus = transition_rates(BASELINE_GAME, 0, 1, m, 4, beta=0.0)
            expected = (m / 4) * ((4 - m) / 4) * 0.5
            assert t_plus == pytest.approx(expected, abs=1e-15)
            assert t_minus == pytest.approx(expected, abs=1e-15)

    def test_half_mix_neutral_is_one_eighth(self):
        t_plus, t_minus = transition_rates(BASELINE_GAME, 0, 1, m=2, N=4, beta=0.0)
        assert t_plus == pytest.approx(1 / 8, abs=1e-15)
        assert t_minus == pytest.approx(1 / 8, abs=1e-15)

    @given(v=st.floats(min_value=-5, max_value=5, allow_nan=False),
           beta=st.floats(min_value=0, max_value=5, allow_nan=False))
    def test_uniform_payoffs_balance_rates(self, v, beta):
        game = GamePayoffs(("A", "B"), np.full((2, 2), v))
        t_plus, t_minus = transition_rates(game, 0, 1, m=3, N=7, beta=beta)
        assert t_plus == pytest.approx(t_minus, rel=1e-12)

    @given(game=random_game(2),
           m=st.integers(min_value=1, max_value=9),
           beta=st.floats(min_value=0, max_value=2, allow_nan=False))
    def test_bounds_and_ratio_identity(self, game, m, beta):
        N = 10
        t_plus, t_minus = transition_rates(game, 0, 1, m, N, beta)
        assert 0 <= t_plus <= 0.25 and 0 <= t_minus <= 0.25
        assert t_plus + t_minus <= 1.0
        pair = average_payoffs(game, 0, 1, m, N)
        expected_ratio = math.exp(-beta * (pair.pi_i - pair.pi_j))
        assert t_minus / t_plus == pytest.approx(expected_ratio, rel=1e-12)

    def test_out_of_range_mix_rejected(self):
        with pytest.raises(ParameterError):
            transition_rates(BASELINE_GAME, 0, 1, m=0, N=4, beta=0.1)


class TestFixationProbability:
    def test_frozen_regression_value(self):
        rho = fixation_probability(BASELINE_GAME, mutant=0, resident=1, N=4, beta=1.0)
        assert rho == pytest.approx(RHO_BASELINE_N4_BETA1, rel=1e-12)
        # the frozen constant is itself reproducible from the literal oracle
        assert fixation_naive(BASELINE_GAME.matrix, 0, 1, 4, 1.0) == \
            RHO_BASELINE_N4_BETA1

    @given(game=games, N=st.sampled_from([2, 3, 10, 100]))
    @settings(max_examples=60)
    def test_neutral_drift_is_one_over_population(self, game, N):
        rho = fixation_probability(game, 0, 1, N, beta=0.0)
        assert abs(rho - 1.0 / N) <= 1e-12

    @given(v=st.floats(min_value=-5, max_value=5, allow_nan=False),
           beta=st.floats(min_value=0, max_value=3, allow_nan=False),
           N=st.integers(min_value=2, max_value=40))
    def test_uniform_payoffs_are_neutral(self, v, beta, N):
        game = GamePayoffs(("A", "B"), np.full((2, 2), v))
        assert fixation_probability(game, 0, 1, N, beta) == pytest.approx(
            1.0 / N, abs=1e-12)

    @given(game=games,
           N=st.integers(min_value=2, max_value=20),
           beta=st.floats(min_value=0, max_value=1, allow_nan=False))
    @settings(max_examples=80)
    def test_log_domain_matches_literal_product_sum(self, game, N, beta):
        expected = fixation_naive(game.matrix, 0, 1, N, beta)
        actual = fixation_probability(game, 0, 1, N, beta)
        assert actual == pytest.approx(expected, rel=1e-9)

    @given(game=random_game(2),
           eps=st.floats(min_value=1e-6, max_value=5, allow_nan=False),
           beta=st.floats(min_value=0, max_value=2, allow_nan=False))
    @settings(max_examples=60)
    def test_richer_mutant_row_does_not_lower_fixation(self, game, eps, beta):
        boosted = np.array(game.matrix)
        boosted[0] += eps
        boosted_game = GamePayoffs(game.strategy_names, boosted)
        before = fixation_probability(game, 0, 1, 12, beta)
        after = fixation_probability(boosted_game, 0, 1, 12, beta)
        assert after >= before - 1e-15

    def test_extreme_selection_underflows_to_tiny_not_zero(self):
        # resident is overwhelmingly favoured: the sum overflows the
        # representable range, the probability clamps to the smallest normal
        hopeless = GamePayoffs(("A", "B"), [[0.0, 0.0], [100.0, 100.0]])
        rho = fixation_probability(hopeless, 0, 1, N=100, beta=100.0)
        assert rho > 0.0
        assert math.isfinite(log_fixation_probability(hopeless, 0, 1, 100, 100.0))

    def test_invalid_arguments(self):
        with pytest.raises(ParameterError):
            fixation_probability(BASELINE_GAME, 0, 0, 4, 1.0)
        with pytest.raises(ParameterError):
            fixation_probability(BASELINE_GAME, 0, 1, 4, -1.0)
        with pytest.raises(ParameterError):
            fixation_probability(BASELINE_GAME, 0, 1, 1, 1.0)
