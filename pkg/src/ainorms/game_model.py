"""Payoff matrices for AI-use strategies in an assessment cohort.

Two games are supported:

* a baseline 2x2 coordination game between responsible (R) and
  opportunistic (O) AI use, parameterised by learning benefit, effort
  cost, short-term advantage and a legitimacy cost for mismatching the
  peer norm;
* an extended 4x4 game that splits responsible use by reflection quality
  (meaningful RR vs. superficial RS) and opportunistic use by rule
  compliance (tolerated O vs. sanctioned misuse M), with a reflection
  reward r, reflection effort cost kappa, superficial discount sigma and
  misconduct cost tau.

Strategy order is canonical everywhere: (R, O) for the baseline game and
(RR, RS, O, M) for the extended game. All downstream indexing, CSV
columns and plots rely on this order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

BASELINE_STRATEGIES = ("R", "O")
EXTENDED_STRATEGIES = ("RR", "RS", "O", "M")


class ParameterError(ValueError):
    """A model parameter or argument is outside its documented domain."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class BaselineParams:
    """Parameters of the 2-strategy game.

    Attributes:
        learning_benefit: additional learning value of responsible use (L).
        effort_cost: effort cost of responsible use (C).
        shortterm_advantage: short-term performance gain of opportunistic
            use (S).
        legitimacy_cost: payoff loss when behaviour mismatches the peer
            norm (delta); must be >= 0.
    """

    learning_benefit: float
    effort_cost: float
    shortterm_advantage: float
    legitimacy_cost: float

    def __post_init__(self) -> None:
        for name in ("learning_benefit", "effort_cost",
                     "shortterm_advantage", "legitimacy_cost"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.legitimacy_cost < 0:
            raise ParameterError(
                f"legitimacy_cost must be >= 0, got {self.legitimacy_cost}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, float]) -> "BaselineParams":
        """Build from a config mapping with keys L, C, S, delta."""
        try:
            return cls(
                learning_benefit=data["L"],
                effort_cost=data["C"],
                shortterm_advantage=data["S"],
                legitimacy_cost=data["delta"],
            )
        except KeyError as exc:
            raise ParameterError(f"missing baseline parameter key: {exc}") from exc


@dataclass(frozen=True)
class ExtendedParams:
    """Parameters of the 4-strategy game with reflective assessment.

    The base payoffs a, b, c, d carry over the coordination structure of
    the baseline game (a: responsible vs responsible, b: responsible vs
    opportunistic, c: opportunistic vs responsible, d: opportunistic vs
    opportunistic); they are taken as given rather than derived from the
    baseline parameters.

    Attributes:
        a, b, c, d: base payoffs.
        legitimacy_cost: norm-mismatch cost delta, >= 0.
        reflection_reward: assessment credit r for meaningful reflection.
        reflection_effort: effort cost kappa of meaningful reflection, >= 0.
        superficial_factor: fraction sigma in [0, 1] of reward and effort
            realised by superficial reflection.
        misconduct_cost: extra penalty tau >= 0 borne by misuse.
    """

    a: float
    b: float
    c: float
    d: float
    legitimacy_cost: float
    reflection_reward: float
    reflection_effort: float
    superficial_factor: float
    misconduct_cost: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "legitimacy_cost", "reflection_reward",
                     "reflection_effort", "superficial_factor", "misconduct_cost"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if not 0.0 <= self.superficial_factor <= 1.0:
            raise ParameterError(
                f"superficial_factor must lie in [0, 1], got {self.superficial_factor}")
        for name in ("legitimacy_cost", "reflection_effort", "misconduct_cost"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, float]) -> "ExtendedParams":
        """Build from a config mapping with keys a, b, c, d, delta, r, kappa, sigma, tau."""
        try:
            return cls(
                a=data["a"], b=data["b"], c=data["c"], d=data["d"],
                legitimacy_cost=data["delta"],
                reflection_reward=data["r"],
                reflection_effort=data["kappa"],
                superficial_factor=data["sigma"],
                misconduct_cost=data["tau"],
            )
        except KeyError as exc:
            raise ParameterError(f"missing extended parameter key: {exc}") from exc


@dataclass(frozen=True, eq=False)
class GamePayoffs:
    """A square payoff matrix over named strategies.

    ``matrix[i, j]`` is the payoff to the row strategy i against the
    column strategy j. Immutable after construction; equality and hashing
    are by content so payoff-keyed caches work across identical games.
    """

    strategy_names: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        names = tuple(str(s) for s in self.strategy_names)
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ParameterError(f"payoff matrix must be square, got shape {mat.shape}")
        if mat.shape[0] != len(names):
            raise ParameterError(
                f"{len(names)} strategy names for a {mat.shape[0]}x{mat.shape[1]} matrix")
        if not np.all(np.isfinite(mat)):
            raise ParameterError("payoff matrix entries must be finite")
        mat.setflags(write=False)
        object.__setattr__(self, "strategy_names", names)
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return len(self.strategy_names)

    def index(self, name: str) -> int:
        return self.strategy_names.index(name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GamePayoffs):
            return NotImplemented
        return (self.strategy_names == other.strategy_names
                and self.matrix.shape == other.matrix.shape
                and bool(np.all(self.matrix == other.matrix)))

    def __hash__(self) -> int:
        return hash((self.strategy_names, self.matrix.tobytes()))


def baseline_matrix(params: BaselineParams) -> GamePayoffs:
    """Payoffs of the 2-strategy game over (R, O).

    Responsible use earns the learning benefit net of effort, opportunistic
    use earns the short-term advantage; whenever the two players' choices
    differ, the off-norm interaction costs the legitimacy penalty:

        R vs R: L - C          R vs O: L - C - delta
        O vs R: S - delta      O vs O: S
    """
    L = params.learning_benefit
    C = params.effort_cost
    S = params.shortterm_advantage
    delta = params.legitimacy_cost
    matrix = [
        [L - C, L - C - delta],
        [S - delta, S],
    ]
    return GamePayoffs(BASELINE_STRATEGIES, np.array(matrix))


def extended_matrix(params: ExtendedParams) -> GamePayoffs:
    """Payoffs of the 4-strategy game over (RR, RS, O, M).

    Meaningful reflection earns r at cost kappa; superficial reflection
    earns and pays the fraction sigma of each; opportunistic rows pay the
    legitimacy cost delta against responsible partners; misuse additionally
    pays tau everywhere. Note the asymmetry in the RR row: against misuse
    the reflection reward is not granted (entry b - kappa), which is kept
    as modelled rather than symmetrised.
    """
    a, b, c, d = params.a, params.b, params.c, params.d
    delta = params.legitimacy_cost
    r = params.reflection_reward
    kappa = params.reflection_effort
    sigma = params.superficial_factor
    tau = params.misconduct_cost
    matrix = [
        [a + r - kappa, a + r - kappa, b + r - kappa, b - kappa],
        [a + sigma * r - sigma * kappa, a + sigma * r - sigma * kappa,
         b + sigma * r - sigma * kappa, b - sigma * kappa],
        [c - delta, c - delta, d, d],
        [c - delta - tau, c - delta - tau, d - tau, d - tau],
    ]
    return GamePayoffs(EXTENDED_STRATEGIES, np.array(matrix))


def is_coordination(payoffs: GamePayoffs) -> bool:
    """True iff a 2x2 game strictly rewards matching the partner's strategy.

    Checks matrix[0, 0] > matrix[0, 1] and matrix[1, 1] > matrix[1, 0].
    Raises ParameterError for non-2x2 input.
    """
    if payoffs.n != 2:
        raise ParameterError(f"coordination check needs a 2x2 game, got n={payoffs.n}")
    m = payoffs.matrix
    return bool(m[0, 0] > m[0, 1] and m[1, 1] > m[1, 0])
