import numpy as np
import pytest

from ainorms import (
    DynamicsConfig,
    GamePayoffs,
    ParameterError,
    SimulationRun,
    occupancy_trace,
    simulate,
)
from helpers import fig_payoffs


def make_run(payoffs=None, N=40, beta=0.1, mu=0.01, steps=60_000, seed=7,
             burn_in=10_000, **kwargs):
    return SimulationRun(
        config=DynamicsConfig(N, beta, mu),
        payoffs=payoffs if payoffs is not None else fig_payoffs(r=1.0),
        steps=steps, seed=seed, burn_in=burn_in, **kwargs)


class TestValidation:
    def test_burn_in_must_not_exceed_steps(self):
        with pytest.raises(ParameterError):
            make_run(steps=10, burn_in=11)

    def test_initial_counts_must_match_population(self):
        with pytest.raises(ParameterError):
            make_run(initial_counts=(10, 10, 10, 11))
        with pytest.raises(ParameterError):
            make_run(initial_counts=(40, 0, 0))

    def test_frequency_estimation_needs_post_burn_in_steps(self):
        with pytest.raises(ParameterError):
            simulate(make_run(steps=500, burn_in=500))

    def test_zero_mutation_heterogeneous_start_warns(self):
        with pytest.warns(RuntimeWarning, match="ergodic"):
            simulate(make_run(mu=0.0, steps=200, burn_in=0))


class TestTrace:
    def test_rows_conserve_population(self):
        trace = occupancy_trace(make_run(steps=5_000, burn_in=500, thinning=25))
        assert trace.counts.shape[1] == 4
        assert (trace.counts.sum(axis=1) == 40).all()
        assert trace.steps[0] == 500 and trace.steps[1] - trace.steps[0] == 25

    def test_no_post_burn_in_steps_gives_empty_trace(self):
        trace = occupancy_trace(make_run(steps=1_000, burn_in=1_000))
        assert trace.counts.shape == (0, 4)
        assert trace.steps.size == 0

    def test_homogeneous_start_without_mutation_is_constant(self):
        trace = occupancy_trace(make_run(mu=0.0, steps=2_000, burn_in=0,
                                         initial_counts=(40, 0, 0, 0)))
        assert (trace.counts == [40, 0, 0, 0]).all()

    def test_bit_identical_across_reruns(self):
        run = make_run(steps=20_000, burn_in=1_000, thinning=7)
        first = occupancy_trace(run)
        second = occupancy_trace(run)
        assert np.array_equal(first.counts, second.counts)
        assert np.array_equal(first.steps, second.steps)

    def test_different_seeds_diverge(self):
        a = occupancy_trace(make_run(seed=1, steps=20_000, burn_in=0))
        b = occupancy_trace(make_run(seed=2, steps=20_000, burn_in=0))
        assert not np.array_equal(a.counts, b.counts)

    def test_csv_export(self, tmp_path):
        trace = occupancy_trace(make_run(steps=2_000, burn_in=0, thinning=100))
        path = tmp_path / "trace.csv"
        trace.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "step,count_RR,count_RS,count_O,count_M"
        assert len(lines) == 1 + trace.counts.shape[0]
        first = [int(v) for v in lines[1].split(",")]
        assert first[0] == 0 and sum(first[1:]) == 40


class TestFrequencyEstimate:
    def test_means_are_a_probability_vector(self):
        estimate = simulate(make_run(steps=50_000, burn_in=5_000))
        assert abs(estimate.mean_frequencies.sum() - 1.0) <= 1e-9
        assert np.all(estimate.mean_frequencies >= 0)
        assert np.all(estimate.mean_frequencies <= 1)
        assert estimate.effective_samples == 50

    def test_pure_exploration_is_uniform(self):
        # full exploration: payoffs cannot matter, frequencies approach 1/4
        estimate = simulate(make_run(mu=1.0, beta=0.0, steps=400_000,
                                     burn_in=50_000, seed=3))
        err = np.abs(estimate.mean_frequencies - 0.25)
        assert np.all(err <= 3 * estimate.standard_errors)

    def test_constant_payoffs_are_neutral(self):
        flat = GamePayoffs(("a", "b", "c", "d"), np.full((4, 4), 2.0))
        estimate = simulate(make_run(payoffs=flat, mu=0.01, beta=0.9,
                                     N=20, steps=2_000_000, burn_in=200_000, seed=5))
        err = np.abs(estimate.mean_frequencies - 0.25)
        assert np.all(err <= 3 * estimate.standard_errors)

    def test_neutral_updating_is_uniform(self):
        estimate = simulate(make_run(beta=0.0, mu=0.05, N=20,
                                     steps=1_500_000, burn_in=100_000, seed=11))
        err = np.abs(estimate.mean_frequencies - 0.25)
        assert np.all(err <= 3 * estimate.standard_errors)

    def test_single_batch_has_nan_errors(self):
        estimate = simulate(make_run(steps=1_001, burn_in=1_000))
        assert estimate.effective_samples == 1
        assert np.isnan(estimate.standard_errors).all()

    def test_record_serialisation(self):
        record = simulate(make_run(steps=5_000, burn_in=500)).as_record()
        assert set(record) == {"strategy_names", "mean_frequencies",
                               "standard_errors", "effective_samples"}
        assert sum(record["mean_frequencies"].values()) == pytest.approx(1.0)
