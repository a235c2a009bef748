"""Rare-mutation Markov chain over homogeneous strategy states.

When exploration is rare the population is almost always homogeneous, and
the long-run dynamics reduce to a small Markov chain with one state per
strategy. A transition from resident state i to state j happens when a
single j-mutant (appearing uniformly among the n-1 alternatives) fixates,
so the off-diagonal entries are fixation probabilities divided by n-1.
The stationary distribution of this chain is the long-run fraction of
time the cohort spends in each norm, which is the quantity every sweep
and figure reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .finite_population import TINY, log_fixation_probability
from .game_model import GamePayoffs, ParameterError

ROW_SUM_TOL = 1e-10
RESIDUAL_TOL = 1e-8


class ChainError(ValueError):
    """The transition matrix is not a valid row-stochastic chain."""


class SolverError(RuntimeError):
    """The stationary linear system could not be solved to tolerance."""


@dataclass(frozen=True)
class EmbeddedChain:
    """Row-stochastic transition matrix over homogeneous strategy states.

    ``underflowed_pairs`` lists (resident, mutant) name pairs whose
    fixation probability underflowed double precision and was clamped to
    the smallest positive normal value.
    """

    strategy_names: tuple[str, ...]
    transition_matrix: np.ndarray
    underflowed_pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        mat = np.array(self.transition_matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "strategy_names", tuple(self.strategy_names))
        object.__setattr__(self, "transition_matrix", mat)

    @property
    def n(self) -> int:
        return len(self.strategy_names)


@dataclass(frozen=True)
class ChainDiagnostics:
    """Solver residual and numeric-underflow flags for one solve."""

    residual: float
    underflowed_pairs: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class StationaryResult:
    """Stationary probability over homogeneous states, with provenance."""

    frequencies: np.ndarray
    chain: EmbeddedChain
    diagnostics: ChainDiagnostics = field(default_factory=lambda: ChainDiagnostics(0.0))

    def __post_init__(self) -> None:
        freq = np.array(self.frequencies, dtype=float)
        freq.setflags(write=False)
        object.__setattr__(self, "frequencies", freq)

    def frequency_of(self, name: str) -> float:
        return float(self.frequencies[self.chain.strategy_names.index(name)])

    def as_record(self) -> dict:
        """JSON-ready record: frequencies by strategy name plus residual."""
        return {
            "strategy_names": list(self.chain.strategy_names),
            "frequencies": {
                name: float(f)
                for name, f in zip(self.chain.strategy_names, self.frequencies)
            },
            "residual": self.diagnostics.residual,
        }


def build_chain(payoffs: GamePayoffs, N: int, beta: float) -> EmbeddedChain:
    """Embed the fixation probabilities of every ordered strategy pair.

    Entry (i, j), i != j, is rho(mutant j into resident i) / (n - 1); the
    diagonal absorbs the remainder so each row sums to 1.
    """
    n = payoffs.n
    if n < 2:
        raise ParameterError(f"need at least 2 strategies, got {n}")
    log_tiny = math.log(TINY)
    matrix = np.zeros((n, n))
    underflowed: list[tuple[str, str]] = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            log_rho = log_fixation_probability(payoffs, j, i, N, beta)
            if log_rho < log_tiny:
                underflowed.append((payoffs.strategy_names[i], payoffs.strategy_names[j]))
            matrix[i, j] = max(math.exp(log_rho), TINY) / (n - 1)
        matrix[i, i] = 1.0 - matrix[i].sum()
    return EmbeddedChain(payoffs.strategy_names, matrix, tuple(underflowed))


def stationary_distribution(chain: EmbeddedChain) -> StationaryResult:
    """Solve v M = v, sum(v) = 1 for the unique stationary vector.

    The redundant balance equation is replaced by the normalisation row
    and the system solved by LU elimination with partial pivoting. The
    left-invariance residual ||v M - v||_inf is reported and must meet
    RESIDUAL_TOL; rows may drift from sum 1 by at most ROW_SUM_TOL (they
    are renormalised), anything larger is a construction error.
    """
    mat = np.array(chain.transition_matrix, dtype=float)
    n = mat.shape[0]
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ChainError(f"transition matrix must be square, got shape {mat.shape}")
    if np.any(mat < 0):
        raise ChainError("transition matrix has negative entries")
    row_sums = mat.sum(axis=1)
    drift = np.abs(row_sums - 1.0).max()
    if drift > ROW_SUM_TOL:
        raise ChainError(f"rows must sum to 1 within {ROW_SUM_TOL}, worst drift {drift:.3e}")
    mat /= row_sums[:, None]

    system = mat.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        freq = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"stationary system is singular: {exc}") from exc

    # Scrub solver noise: clip roundoff negatives, renormalise exactly.
    if freq.min() < -1e-9:
        raise SolverError(f"stationary vector has negative mass {freq.min():.3e}")
    freq = np.clip(freq, 0.0, None)
    freq /= freq.sum()
    residual = float(np.abs(freq @ mat - freq).max())
    if not math.isfinite(residual) or residual > RESIDUAL_TOL:
        raise SolverError(f"left-invariance residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    diagnostics = ChainDiagnostics(residual=residual,
                                   underflowed_pairs=chain.underflowed_pairs)
    return StationaryResult(freq, chain, diagnostics)
