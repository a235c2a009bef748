"""Finite-population evolutionary dynamics of AI-use norms in assessment.

The package builds coordination-game payoff matrices over AI-use
strategies, computes fixation probabilities under pairwise-comparison
(Fermi) updating, embeds them in a rare-mutation Markov chain whose
stationary distribution gives the long-run norm frequencies, and checks
the analytic results against an explicit agent-based simulation. A CLI
reproduces the reward sweep, peer-sensitivity sweep and reward-vs-effort
design-space experiments as CSV/JSON artifacts.
"""

__version__ = "0.1.0"

from .game_model import (
    BASELINE_STRATEGIES,
    EXTENDED_STRATEGIES,
    BaselineParams,
    ExtendedParams,
    GamePayoffs,
    ParameterError,
    baseline_matrix,
    extended_matrix,
    is_coordination,
)
from .finite_population import (
    DynamicsConfig,
    PairPayoffs,
    average_payoffs,
    fermi_probability,
    fixation_probability,
    log_fixation_probability,
    transition_rates,
)
from .small_mutation_chain import (
    ChainDiagnostics,
    ChainError,
    EmbeddedChain,
    SolverError,
    StationaryResult,
    build_chain,
    stationary_distribution,
)
from .monte_carlo import (
    FrequencyEstimate,
    OccupancyTrace,
    SimulationRun,
    occupancy_trace,
    simulate,
)
from .sweeps import (
    Axis,
    SweepSpec,
    SweepTable,
    ThresholdResult,
    design_space_grid,
    find_threshold,
    run_sweep,
    write_csv,
)

__all__ = [
    "__version__",
    "BASELINE_STRATEGIES",
    "EXTENDED_STRATEGIES",
    "BaselineParams",
    "ExtendedParams",
    "GamePayoffs",
    "ParameterError",
    "baseline_matrix",
    "extended_matrix",
    "is_coordination",
    "DynamicsConfig",
    "PairPayoffs",
    "average_payoffs",
    "fermi_probability",
    "fixation_probability",
    "log_fixation_probability",
    "transition_rates",
    "ChainDiagnostics",
    "ChainError",
    "EmbeddedChain",
    "SolverError",
    "StationaryResult",
    "build_chain",
    "stationary_distribution",
    "FrequencyEstimate",
    "OccupancyTrace",
    "SimulationRun",
    "occupancy_trace",
    "simulate",
    "Axis",
    "SweepSpec",
    "SweepTable",
    "ThresholdResult",
    "design_space_grid",
    "find_threshold",
    "run_sweep",
    "write_csv",
]
