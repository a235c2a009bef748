"""Parameter sweeps over reflection reward, reflection effort and peer
sensitivity, with threshold detection for norm tipping points.

A sweep evaluates the stationary strategy frequencies of the 4-strategy
game on a rectangular grid over one or two of the axes r (reflection
reward), kappa (reflection effort) and beta (peer sensitivity). Grid
points are independent; rows are assembled in grid order (first axis
outermost) and are bit-reproducible for the analytic engine. Tables
serialise to CSV with the fixed column order

    r,kappa,beta,freq_RR,freq_RS,freq_O,freq_M,residual

using shortest round-trip float formatting, so identical parameters give
byte-identical files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict, replace
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .finite_population import DynamicsConfig
from .game_model import EXTENDED_STRATEGIES, ExtendedParams, ParameterError, extended_matrix
from .monte_carlo import SimulationRun, simulate
from .small_mutation_chain import build_chain, stationary_distribution

AXIS_NAMES = ("r", "kappa", "beta")
COLUMNS = ("r", "kappa", "beta", "freq_RR", "freq_RS", "freq_O", "freq_M", "residual")
ENGINES = ("analytic", "mc")

_PARAM_FIELD = {"r": "reflection_reward", "kappa": "reflection_effort"}


@dataclass(frozen=True)
class Axis:
    """A uniformly spaced, endpoint-inclusive sweep axis."""

    name: str
    minimum: float
    maximum: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ParameterError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if not (math.isfinite(self.minimum) and math.isfinite(self.maximum)):
            raise ParameterError(f"axis bounds must be finite, got "
                                 f"[{self.minimum}, {self.maximum}]")
        if not self.minimum < self.maximum:
            raise ParameterError(
                f"axis {self.name}: need minimum < maximum, got "
                f"[{self.minimum}, {self.maximum}]")
        if self.count < 2:
            raise ParameterError(f"axis {self.name}: need count >= 2, got {self.count}")

    def values(self) -> np.ndarray:
        """Grid coordinates min + i*(max-min)/(count-1), both endpoints included."""
        i = np.arange(self.count, dtype=float)
        return self.minimum + i * (self.maximum - self.minimum) / (self.count - 1)


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters plus one or two axes and an engine choice.

    The Monte Carlo engine needs a positive mutation rate and a seed; the
    grid point with index k runs with seed ``seed + k``.
    """

    params: ExtendedParams
    dynamics: DynamicsConfig
    axes: tuple[Axis, ...]
    engine: str = "analytic"
    seed: int | None = None
    mc_steps: int = 10_000_000
    mc_burn_in: int = 1_000_000

    def __post_init__(self) -> None:
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if not 1 <= len(axes) <= 2:
            raise ParameterError(f"a sweep needs 1 or 2 axes, got {len(axes)}")
        names = [ax.name for ax in axes]
        if len(set(names)) != len(names):
            raise ParameterError(f"axis names must be distinct, got {names}")
        if self.engine not in ENGINES:
            raise ParameterError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.engine == "mc":
            if self.dynamics.mutation_rate <= 0:
                raise ParameterError("the mc engine needs mutation_rate > 0")
            if self.seed is None:
                raise ParameterError("the mc engine needs a seed")

    def as_dict(self) -> dict:
        return {
            "params": asdict(self.params),
            "dynamics": asdict(self.dynamics),
            "axes": [asdict(ax) for ax in self.axes],
            "engine": self.engine,
            "seed": self.seed,
            "mc_steps": self.mc_steps,
            "mc_burn_in": self.mc_burn_in,
        }


@dataclass(frozen=True)
class ThresholdResult:
    """First grid crossing of a frequency level, refined by bisection.

    ``monotone`` is False when the level is crossed more than once along
    the grid; ``bracket`` is the refined grid interval (None when the
    first grid point is already at or above the level).
    """

    strategy: str
    level: float
    coordinate: float
    monotone: bool
    bracket: tuple[float, float] | None

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "level": self.level,
            "coordinate": self.coordinate,
            "monotone": self.monotone,
            "bracket": list(self.bracket) if self.bracket else None,
        }


@dataclass(frozen=True)
class SweepTable:
    """Rectangular sweep result: one row per grid point, fixed columns."""

    spec: SweepSpec
    rows: np.ndarray
    failures: tuple[tuple[int, str], ...] = ()
    columns: tuple[str, ...] = COLUMNS

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    @property
    def ok(self) -> bool:
        return not self.failures


def _point_params(spec: SweepSpec, overrides: dict[str, float]) -> tuple[ExtendedParams, float]:
    params = spec.params
    field_overrides = {
        _PARAM_FIELD[name]: value
        for name, value in overrides.items() if name in _PARAM_FIELD
    }
    if field_overrides:
        params = replace(params, **field_overrides)
    beta = overrides.get("beta", spec.dynamics.selection_intensity)
    return params, beta


def _evaluate_point(spec: SweepSpec, params: ExtendedParams, beta: float,
                    index: int) -> tuple[np.ndarray, float]:
    payoffs = extended_matrix(params)
    if spec.engine == "analytic":
        result = stationary_distribution(build_chain(
            payoffs, spec.dynamics.population_size, beta))
        return np.asarray(result.frequencies), result.diagnostics.residual
    run = SimulationRun(
        config=replace(spec.dynamics, selection_intensity=beta),
        payoffs=payoffs,
        steps=spec.mc_steps,
        seed=spec.seed + index,
        burn_in=spec.mc_burn_in,
    )
    estimate = simulate(run)
    return np.asarray(estimate.mean_frequencies), float("nan")


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate the stationary frequencies on the full grid.

    One row per grid point in grid order (first axis outermost). A grid
    point whose evaluation raises is recorded in ``failures`` and keeps
    NaN frequencies; the sweep continues.
    """
    axis_values = [ax.values() for ax in spec.axes]
    axis_names = [ax.name for ax in spec.axes]
    n_rows = int(np.prod([len(v) for v in axis_values]))
    rows = np.full((n_rows, len(COLUMNS)), np.nan)
    failures: list[tuple[int, str]] = []
    for index, coords in enumerate(product(*axis_values)):
        overrides = dict(zip(axis_names, (float(c) for c in coords)))
        params, beta = _point_params(spec, overrides)
        rows[index, 0] = params.reflection_reward
        rows[index, 1] = params.reflection_effort
        rows[index, 2] = beta
        try:
            freqs, residual = _evaluate_point(spec, params, beta, index)
        except Exception as exc:  # noqa: BLE001 - failed rows are part of the contract
            failures.append((index, f"{type(exc).__name__}: {exc}"))
            continue
        rows[index, 3:7] = freqs
        rows[index, 7] = residual
    rows.setflags(write=False)
    return SweepTable(spec=spec, rows=rows, failures=tuple(failures))


def design_space_grid(spec: SweepSpec) -> SweepTable:
    """2D sweep over exactly the axes r and kappa (the design space)."""
    names = sorted(ax.name for ax in spec.axes)
    if len(spec.axes) != 2 or names != ["kappa", "r"]:
        raise ParameterError(
            f"design-space grid needs exactly the axes r and kappa, got {names}")
    return run_sweep(spec)


def _analytic_frequency(spec: SweepSpec, axis_name: str, value: float,
                        strategy: str) -> float:
    params, beta = _point_params(spec, {axis_name: value})
    payoffs = extended_matrix(params)
    result = stationary_distribution(build_chain(
        payoffs, spec.dynamics.population_size, beta))
    return result.frequency_of(strategy)


def find_threshold(table: SweepTable, strategy: str, level: float = 0.5,
                   coordinate_tol: float = 1e-3) -> ThresholdResult | None:
    """Locate where a strategy's frequency first reaches a level.

    Scans the (1D) grid for the first row with frequency >= level, then
    refines the crossing between the bracketing grid points by bisection
    with the analytic engine until the bracket is narrower than
    ``coordinate_tol``. Returns None when the level is never reached; a
    level already met at the first grid point returns the grid minimum.
    Multiple grid crossings are flagged via ``monotone=False``.
    """
    if len(table.spec.axes) != 1:
        raise ParameterError("threshold detection needs a table from a 1D sweep")
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level must lie in (0, 1), got {level}")
    if strategy not in EXTENDED_STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}")
    if table.failures:
        raise ParameterError("threshold detection on a table with failed rows")

    axis = table.spec.axes[0]
    coords = table.column(axis.name)
    freqs = table.column(f"freq_{strategy}")
    above = freqs >= level
    crossings = int(np.count_nonzero(above[1:] != above[:-1]))
    monotone = crossings <= 1
    if not above.any():
        return None
    first = int(np.argmax(above))
    if first == 0:
        return ThresholdResult(strategy, level, float(coords[0]), monotone, None)

    lo, hi = float(coords[first - 1]), float(coords[first])
    bracket = (lo, hi)
    while hi - lo > coordinate_tol:
        mid = 0.5 * (lo + hi)
        if _analytic_frequency(table.spec, axis.name, mid, strategy) >= level:
            hi = mid
        else:
            lo = mid
    return ThresholdResult(strategy, level, 0.5 * (lo + hi), monotone, bracket)


def _format(value: float) -> str:
    return repr(float(value))


def write_csv(tables: SweepTable | Iterable[SweepTable], path) -> None:
    """Write one or several tables (shared header) as round-trip CSV."""
    if isinstance(tables, SweepTable):
        tables = [tables]
    tables = list(tables)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for table in tables:
            for row in table.rows:
                fh.write(",".join(_format(v) for v in row) + "\n")
