"""Pairwise-comparison dynamics in a finite, well-mixed population.

Given a payoff matrix and a population of N agents split between two
strategies, this module computes average payoffs (excluding
self-interaction), the logistic (Fermi) imitation probability with peer
sensitivity beta, the per-step birth-death transition rates, and the
probability that a single mutant strategy fixates in a resident
population.

Fixation is evaluated in the log domain: the product of backward/forward
rate ratios telescopes to exp(-beta * cumulative payoff drift), so

    rho = 1 / (1 + sum_m exp(S_m)),   S_m = -beta * sum_{l<=m} drift(l)

is computed with a log-sum-exp guard and cannot overflow for large
beta * N. All functions are pure; per-pair drift cumsums are cached so
chain construction and sweeps can reuse them across beta values.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .game_model import GamePayoffs, ParameterError

#: Smallest positive normal double; fixation probabilities are clamped here
#: instead of underflowing to exact zero (stationary ratios need nonzero rates).
TINY = sys.float_info.min


@dataclass(frozen=True)
class DynamicsConfig:
    """Population-level update parameters.

    Attributes:
        population_size: number of agents N, >= 2.
        selection_intensity: peer sensitivity beta >= 0 of the imitation
            rule; 0 is neutral drift.
        mutation_rate: exploration probability mu in [0, 1]; only the
            Monte Carlo engine uses it.
    """

    population_size: int
    selection_intensity: float
    mutation_rate: float = 0.0

    def __post_init__(self) -> None:
        if int(self.population_size) != self.population_size or self.population_size < 2:
            raise ParameterError(
                f"population_size must be an integer >= 2, got {self.population_size}")
        object.__setattr__(self, "population_size", int(self.population_size))
        if not math.isfinite(self.selection_intensity) or self.selection_intensity < 0:
            raise ParameterError(
                f"selection_intensity must be >= 0, got {self.selection_intensity}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ParameterError(
                f"mutation_rate must lie in [0, 1], got {self.mutation_rate}")


class PairPayoffs(NamedTuple):
    """Average payoffs (pi_i, pi_j) of two strategies at a given mix."""

    pi_i: float
    pi_j: float


def _check_pair(payoffs: GamePayoffs, i: int, j: int) -> None:
    n = payoffs.n
    if not (0 <= i < n and 0 <= j < n):
        raise ParameterError(f"strategy indices ({i}, {j}) out of range for n={n}")
    if i == j:
        raise ParameterError(f"strategy indices must differ, got i=j={i}")


def average_payoffs(payoffs: GamePayoffs, i: int, j: int, k: int, N: int) -> PairPayoffs:
    """Average payoffs when k agents play strategy i and N-k play j.

    Each agent interacts with the N-1 others (no self-interaction):

        pi_i = ((k-1)*m[i,i] + (N-k)*m[i,j]) / (N-1)
        pi_j = (k*m[j,i] + (N-k-1)*m[j,j]) / (N-1)

    Requires 1 <= k <= N-1 and N >= 2.
    """
    _check_pair(payoffs, i, j)
    if N < 2:
        raise ParameterError(f"population size must be >= 2, got {N}")
    if not 1 <= k <= N - 1:
        raise ParameterError(f"composition k must lie in [1, {N - 1}], got {k}")
    m = payoffs.matrix
    pi_i = ((k - 1) * m[i, i] + (N - k) * m[i, j]) / (N - 1)
    pi_j = (k * m[j, i] + (N - k - 1) * m[j, j]) / (N - 1)
    return PairPayoffs(float(pi_i), float(pi_j))


def fermi_probability(payoff_from: float, payoff_to: float, beta: float) -> float:
    """Probability of imitating a model whose payoff is ``payoff_to``.

    Logistic in the payoff difference: 1 / (1 + exp(-beta*(to - from))).
    Saturates smoothly to 0 or 1 for extreme arguments; beta must be >= 0.
    """
    if beta < 0:
        raise ParameterError(f"beta must be >= 0, got {beta}")
    x = -beta * (payoff_to - payoff_from)
    if x > 700.0:
        return TINY
    if x < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


def transition_rates(payoffs: GamePayoffs, i: int, j: int, m: int, N: int,
                     beta: float) -> tuple[float, float]:
    """One-step rates for the count of strategy i to move m -> m+1 / m -> m-1.

    A focal/model pair of opposite strategies meets with probability
    (m/N)((N-m)/N) and the disadvantaged imitation direction is suppressed
    by the logistic rule, giving

        T+(m) = (m/N)((N-m)/N) / (1 + exp(-beta*(pi_i - pi_j)))
        T-(m) = (m/N)((N-m)/N) / (1 + exp(+beta*(pi_i - pi_j)))

    Both lie in [0, 1/4].
    """
    pair = average_payoffs(payoffs, i, j, m, N)
    base = (m / N) * ((N - m) / N)
    t_plus = base * fermi_probability(pair.pi_j, pair.pi_i, beta)
    t_minus = base * fermi_probability(pair.pi_i, pair.pi_j, beta)
    return t_plus, t_minus


@lru_cache(maxsize=4096)
def _drift_cumsum(payoffs: GamePayoffs, mutant: int, resident: int,
                  N: int) -> np.ndarray:
    """Cumulative payoff advantage of the mutant over compositions 1..N-1.

    Beta-independent, so one cache entry serves every selection intensity.
    """
    m = payoffs.matrix
    counts = np.arange(1, N, dtype=float)
    pi_mut = ((counts - 1) * m[mutant, mutant] + (N - counts) * m[mutant, resident]) / (N - 1)
    pi_res = (counts * m[resident, mutant] + (N - counts - 1) * m[resident, resident]) / (N - 1)
    drift = np.cumsum(pi_mut - pi_res)
    drift.setflags(write=False)
    return drift


def log_fixation_probability(payoffs: GamePayoffs, mutant: int, resident: int,
                             N: int, beta: float) -> float:
    """Natural log of the fixation probability (exact up to rounding).

    rho = 1 / (1 + sum_{m=1}^{N-1} exp(-beta * D_m)) with D_m the cumulative
    payoff drift, evaluated via log-sum-exp so it never overflows.
    """
    _check_pair(payoffs, mutant, resident)
    if N < 2:
        raise ParameterError(f"population size must be >= 2, got {N}")
    if beta < 0:
        raise ParameterError(f"beta must be >= 0, got {beta}")
    exponents = -beta * _drift_cumsum(payoffs, mutant, resident, N)
    hi = max(0.0, float(exponents.max()))
    total = hi + math.log(math.exp(-hi) + float(np.exp(exponents - hi).sum()))
    return -total


def fixation_probability(payoffs: GamePayoffs, mutant: int, resident: int,
                         N: int, beta: float) -> float:
    """Probability that one mutant-strategy agent takes over the population.

    Strictly positive: results that underflow double precision are clamped
    to TINY (callers that must distinguish underflow use
    log_fixation_probability).
    """
    log_rho = log_fixation_probability(payoffs, mutant, resident, N, beta)
    return max(math.exp(log_rho), TINY)
