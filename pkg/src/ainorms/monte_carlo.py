"""Agent-based simulation of imitation-with-exploration dynamics.

This is the finite-mutation-rate counterpart (and independent check) of
the rare-mutation chain. Each step one focal agent is drawn uniformly;
with probability mu it explores, adopting a uniformly random strategy
(the current one included), otherwise it picks a distinct model agent
uniformly and imitates the model's strategy with the logistic probability
of the payoff difference, payoffs being the exact population averages at
the current composition (self-interaction excluded).

Each step consumes exactly five random variates in fixed order (focal
index, exploration coin, exploration strategy, model offset, imitation
coin) from a seeded PCG64 generator, so runs are bit-reproducible. The
inner loop is JIT-compiled when numba is importable and falls back to
pure Python otherwise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .finite_population import DynamicsConfig
from .game_model import GamePayoffs, ParameterError

_BLOCK = 1 << 20
_MAX_BATCHES = 50


def _advance_block(pi, strategies, counts, focal, u_mu, explore, model_off,
                   u_imit, mu, beta, n_agents, step0, burn_in, thinning,
                   freq_sums, batch_sums, batch_size, trace):
    n = counts.shape[0]
    n_batches = batch_sums.shape[0]
    n_trace = trace.shape[0]
    for t in range(focal.shape[0]):
        f = focal[t]
        sf = strategies[f]
        if u_mu[t] < mu:
            sn = explore[t]
            if sn != sf:
                counts[sf] -= 1
                counts[sn] += 1
                strategies[f] = sn
        else:
            m = model_off[t]
            if m >= f:
                m += 1
            sm = strategies[m]
            if sm != sf:
                payoff_f = -pi[sf, sf]
                payoff_m = -pi[sm, sm]
                for s in range(n):
                    payoff_f += counts[s] * pi[sf, s]
                    payoff_m += counts[s] * pi[sm, s]
                x = -beta * (payoff_m - payoff_f) / (n_agents - 1)
                if x > 700.0:
                    p = 0.0
                elif x < -700.0:
                    p = 1.0
                else:
                    p = 1.0 / (1.0 + math.exp(x))
                if u_imit[t] < p:
                    counts[sf] -= 1
                    counts[sm] += 1
                    strategies[f] = sm
        post = step0 + t - burn_in
        if post >= 0:
            for s in range(n):
                freq_sums[s] += counts[s]
            if batch_size > 0:
                b = post // batch_size
                if b < n_batches:
                    for s in range(n):
                        batch_sums[b, s] += counts[s]
            if post % thinning == 0:
                row = post // thinning
                if row < n_trace:
                    for s in range(n):
                        trace[row, s] = counts[s]


try:
    from numba import njit

    _advance_block = njit(cache=True)(_advance_block)
except ImportError:  # pragma: no cover - numba is a declared dependency
    pass


@dataclass(frozen=True)
class SimulationRun:
    """One reproducible simulation: dynamics config, game, length and seed.

    ``initial_counts`` fixes the starting composition (must sum to the
    population size); by default the population is split as evenly as the
    strategy count allows. ``thinning`` controls how often the occupancy
    trace records the state (every k-th post-burn-in step).
    """

    config: DynamicsConfig
    payoffs: GamePayoffs
    steps: int
    seed: int
    burn_in: int = 0
    thinning: int = 1
    initial_counts: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ParameterError(f"steps must be >= 0, got {self.steps}")
        if not 0 <= self.burn_in <= self.steps:
            raise ParameterError(
                f"need 0 <= burn_in <= steps, got burn_in={self.burn_in}, steps={self.steps}")
        if self.thinning < 1:
            raise ParameterError(f"thinning must be >= 1, got {self.thinning}")
        if self.initial_counts is not None:
            counts = tuple(int(c) for c in self.initial_counts)
            if len(counts) != self.payoffs.n:
                raise ParameterError(
                    f"initial_counts needs {self.payoffs.n} entries, got {len(counts)}")
            if any(c < 0 for c in counts) or sum(counts) != self.config.population_size:
                raise ParameterError(
                    f"initial_counts must be non-negative and sum to "
                    f"{self.config.population_size}, got {counts}")
            object.__setattr__(self, "initial_counts", counts)

    def starting_counts(self) -> np.ndarray:
        if self.initial_counts is not None:
            return np.array(self.initial_counts, dtype=np.int64)
        n = self.payoffs.n
        base, extra = divmod(self.config.population_size, n)
        counts = np.full(n, base, dtype=np.int64)
        counts[:extra] += 1
        return counts


@dataclass(frozen=True)
class FrequencyEstimate:
    """Time-averaged strategy frequencies with batch-means errors.

    ``standard_errors`` come from ``effective_samples`` equal batches of
    the post-burn-in trajectory (NaN when fewer than two batches fit).
    """

    strategy_names: tuple[str, ...]
    mean_frequencies: np.ndarray
    standard_errors: np.ndarray
    effective_samples: int

    def as_record(self) -> dict:
        return {
            "strategy_names": list(self.strategy_names),
            "mean_frequencies": {
                name: float(f)
                for name, f in zip(self.strategy_names, self.mean_frequencies)
            },
            "standard_errors": {
                name: float(s)
                for name, s in zip(self.strategy_names, self.standard_errors)
            },
            "effective_samples": self.effective_samples,
        }


@dataclass(frozen=True)
class OccupancyTrace:
    """Thinned post-burn-in trajectory of per-strategy agent counts."""

    strategy_names: tuple[str, ...]
    steps: np.ndarray
    counts: np.ndarray

    def write_csv(self, path) -> None:
        """Write `step,count_<name>,...` rows (full integer precision)."""
        header = "step," + ",".join(f"count_{name}" for name in self.strategy_names)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(header + "\n")
            for step, row in zip(self.steps, self.counts):
                fh.write(f"{int(step)}," + ",".join(str(int(c)) for c in row) + "\n")


def _check_run(run: SimulationRun) -> None:
    mu = run.config.mutation_rate
    counts = run.starting_counts()
    if mu == 0.0 and int(np.count_nonzero(counts)) > 1:
        warnings.warn(
            "mutation_rate is 0 with a heterogeneous start: the process can "
            "absorb and time averages may not be ergodic",
            RuntimeWarning,
            stacklevel=3,
        )


def _run(run: SimulationRun, record_trace: bool):
    """Advance the process for run.steps updates, accumulating statistics."""
    cfg = run.config
    n = run.payoffs.n
    N = cfg.population_size
    counts = run.starting_counts()
    strategies = np.repeat(np.arange(n, dtype=np.int64), counts)

    n_post = run.steps - run.burn_in
    n_batches = min(_MAX_BATCHES, n_post)
    batch_size = n_post // n_batches if n_batches else 0
    freq_sums = np.zeros(n, dtype=np.int64)
    batch_sums = np.zeros((n_batches, n), dtype=np.int64)
    n_trace = (n_post - 1) // run.thinning + 1 if (record_trace and n_post > 0) else 0
    trace = np.zeros((n_trace, n), dtype=np.int64)

    pi = np.ascontiguousarray(run.payoffs.matrix)
    rng = np.random.default_rng(run.seed)
    done = 0
    while done < run.steps:
        block = min(_BLOCK, run.steps - done)
        _advance_block(
            pi, strategies, counts,
            rng.integers(0, N, size=block),
            rng.random(block),
            rng.integers(0, n, size=block),
            rng.integers(0, N - 1, size=block),
            rng.random(block),
            float(cfg.mutation_rate), float(cfg.selection_intensity),
            N, done, run.burn_in, run.thinning,
            freq_sums, batch_sums, batch_size, trace,
        )
        done += block
    return freq_sums, batch_sums, batch_size, trace


def simulate(run: SimulationRun) -> FrequencyEstimate:
    """Time-average the post-burn-in strategy frequencies of one run.

    Deterministic given (seed, config, payoffs). The mean is over every
    post-burn-in step; standard errors use batch means so they remain
    honest under the strong autocorrelation of the process.
    """
    if run.steps < 1 or run.steps <= run.burn_in:
        raise ParameterError(
            f"frequency estimation needs steps > burn_in >= 0, got "
            f"steps={run.steps}, burn_in={run.burn_in}")
    _check_run(run)
    freq_sums, batch_sums, batch_size, _ = _run(run, record_trace=False)
    n_post = run.steps - run.burn_in
    N = run.config.population_size
    means = freq_sums / (n_post * N)
    n_batches = batch_sums.shape[0]
    if n_batches >= 2:
        batch_means = batch_sums / (batch_size * N)
        errors = batch_means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    else:
        errors = np.full(run.payoffs.n, np.nan)
    return FrequencyEstimate(run.payoffs.strategy_names, means, errors, n_batches)


def occupancy_trace(run: SimulationRun) -> OccupancyTrace:
    """Record every ``thinning``-th post-burn-in state of one run.

    Row k holds the strategy counts after update ``burn_in + k*thinning``;
    every row sums to the population size. Empty when steps == burn_in.
    """
    _check_run(run)
    _, _, _, trace = _run(run, record_trace=True)
    steps = run.burn_in + run.thinning * np.arange(trace.shape[0], dtype=np.int64)
    return OccupancyTrace(run.payoffs.strategy_names, steps, trace)
