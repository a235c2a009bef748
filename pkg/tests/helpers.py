"""Independent oracles used by the test suite.

These deliberately re-derive results from first principles (literal loops,
streaming simulation) and must stay independent of the implementation
paths they check.
"""
from __future__ import annotations

import math

import numpy as np

from ainorms import DynamicsConfig, ExtendedParams, extended_matrix

FIG_PARAMS = dict(a=1.0, b=0.0, c=1.0, d=2.0, legitimacy_cost=1.0,
                  reflection_effort=1.0, superficial_factor=0.4,
                  misconduct_cost=1.0)


def fig_extended_params(r: float, kappa: float = 1.0) -> ExtendedParams:
    kwargs = dict(FIG_PARAMS, reflection_reward=r, reflection_effort=kappa)
    return ExtendedParams(**kwargs)


def fig_payoffs(r: float, kappa: float = 1.0):
    return extended_matrix(fig_extended_params(r, kappa))


def fig_dynamics(beta: float = 0.1, mu: float = 0.0) -> DynamicsConfig:
    return DynamicsConfig(100, beta, mu)


def average_payoffs_naive(matrix, i: int, j: int, k: int, N: int):
    """Population-average payoffs written out longhand."""
    pi_i = ((k - 1) * matrix[i][i] + (N - k) * matrix[i][j]) / (N - 1)
    pi_j = (k * matrix[j][i] + (N - k - 1) * matrix[j][j]) / (N - 1)
    return pi_i, pi_j


def fixation_naive(matrix, mutant: int, resident: int, N: int, beta: float) -> float:
    """Fixation probability as a literal double loop of rate ratios.

    For each partial sum index m, multiply the backward/forward rate
    ratios T-(l)/T+(l) for l = 1..m, with the rates evaluated directly
    from the logistic rule on the average payoffs. No log-domain tricks.
    """
    total = 1.0
    for m in range(1, N):
        prod = 1.0
        for l in range(1, m + 1):
            pi_mut, pi_res = average_payoffs_naive(matrix, mutant, resident, l, N)
            base = (l / N) * ((N - l) / N)
            t_plus = base / (1.0 + math.exp(-beta * (pi_mut - pi_res)))
            t_minus = base / (1.0 + math.exp(beta * (pi_mut - pi_res)))
            prod *= t_minus / t_plus
        total += prod
    return 1.0 / total


def jump_chain_occupancy(transition_matrix, n_jumps: int, seed: int) -> np.ndarray:
    """Occupancy frequencies from directly simulating the jump chain.

    Streams n_jumps state transitions (self-loops included) sampled from
    the rows of the transition matrix and counts time spent per state.
    """
    mat = np.asarray(transition_matrix, dtype=float)
    n = mat.shape[0]
    cumrows = np.cumsum(mat, axis=1)
    rng = np.random.default_rng(seed)
    occupancy = np.zeros(n, dtype=np.int64)
    state = 0
    block = 1 << 16
    remaining = n_jumps
    while remaining > 0:
        for u in rng.random(min(block, remaining)):
            state = int(np.searchsorted(cumrows[state], u))
            occupancy[state] += 1
        remaining -= block
    return occupancy / n_jumps
