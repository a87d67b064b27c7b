"""Optimal epidemic-intervention schedules for scaled SIR/SEIR models.

Indirect-method solver: the state/costate optimality system is integrated
with fixed-step RK4 inside a forward-backward sweep, and the controls are
recovered from their clamped Hamiltonian stationarity conditions.
"""

from .fbs import (
    FbsSettings,
    GridMismatchError,
    SolveReport,
    evaluate_objective,
    solve,
    solve_uncontrolled,
)
from .integrator import (
    ControlTrajectory,
    IntegrationDivergedError,
    TimeGrid,
    Trajectory,
    integrate_backward,
    integrate_forward,
    rk4_step,
)
from .models import (
    InconsistentPopulationError,
    SeirParams,
    SirParams,
    Strategy,
    StrategyArityError,
    StrategyTag,
    running_cost,
    scale_population,
    seir_field,
    sir_field,
    vector_field,
)
from .pmp import NoAdjointError, adjoint_field, characterize_control, hamiltonian
from .scenarios import (
    ComparisonIncompatibleError,
    RunArtifacts,
    Scenario,
    ScenarioValidationError,
    compare,
    load_scenario,
    presets,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "ControlTrajectory",
    "ComparisonIncompatibleError",
    "FbsSettings",
    "GridMismatchError",
    "InconsistentPopulationError",
    "IntegrationDivergedError",
    "NoAdjointError",
    "RunArtifacts",
    "Scenario",
    "ScenarioValidationError",
    "SeirParams",
    "SirParams",
    "SolveReport",
    "Strategy",
    "StrategyArityError",
    "StrategyTag",
    "TimeGrid",
    "Trajectory",
    "adjoint_field",
    "characterize_control",
    "compare",
    "evaluate_objective",
    "hamiltonian",
    "integrate_backward",
    "integrate_forward",
    "load_scenario",
    "presets",
    "rk4_step",
    "run",
    "running_cost",
    "scale_population",
    "seir_field",
    "sir_field",
    "solve",
    "solve_uncontrolled",
    "vector_field",
]
