"""Forward-backward sweep solver for the controlled epidemic strategies.

Each iteration integrates the state forward under the current controls,
integrates the costates backward along the frozen state, re-characterizes
the controls nodewise, and blends old and new controls with a relaxation
weight.  Convergence requires every signal (each control, state component,
and costate component) to change by less than ``tolerance`` in relative L1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import models, pmp
from .integrator import (
    ControlTrajectory,
    TimeGrid,
    Trajectory,
    integrate_backward,
    integrate_forward,
)
from .models import Strategy


class GridMismatchError(ValueError):
    """Trajectories passed together do not share a time grid."""


@dataclass(frozen=True)
class FbsSettings:
    """Sweep iteration settings on a shared grid.

    ``relaxation`` is the blend weight on the freshly characterized control:
    u_next = relaxation * u_characterized + (1 - relaxation) * u_previous.
    """

    grid: TimeGrid
    tolerance: float = 1e-3
    max_iterations: int = 200
    relaxation: float = 0.3

    def __post_init__(self):
        if not (np.isfinite(self.tolerance) and self.tolerance > 0.0):
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError(f"relaxation must lie in (0, 1], got {self.relaxation}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Converged (or best-effort) trajectories plus iteration diagnostics.

    ``residual_history`` holds, per iteration, the largest tolerance-scaled
    signed change max_sigma(||sigma_new - sigma_old||_1 - tolerance *
    ||sigma_new||_1); convergence means the last entry is <= 0.
    """

    strategy: Strategy
    state: Trajectory
    adjoint: Trajectory
    controls: ControlTrajectory
    objective: float
    iterations: int
    converged: bool
    residual_history: tuple[float, ...]


def evaluate_objective(
    strategy: Strategy, state: Trajectory, controls: ControlTrajectory
) -> float:
    """Trapezoidal quadrature of the running cost over the shared grid."""
    if state.grid != controls.grid:
        raise GridMismatchError("state and controls live on different grids")
    cost = np.array(
        [
            models.running_cost(strategy, x, u)
            for x, u in zip(state.values, controls.values)
        ]
    )
    return float(state.grid.h * (0.5 * cost[0] + cost[1:-1].sum() + 0.5 * cost[-1]))


def solve_uncontrolled(strategy: Strategy, x0, grid: TimeGrid) -> Trajectory:
    """Forward-integrate the strategy's model family with all controls zero."""
    base = strategy.uncontrolled() if strategy.is_controlled else strategy

    def f(t, x, u):
        return models.vector_field(base, x, u)

    return integrate_forward(f, x0, grid, ControlTrajectory.zeros(grid, 0))


def solve(strategy: Strategy, x0, settings: FbsSettings) -> SolveReport:
    """Run the forward-backward sweep for a controlled strategy.

    Starts from identically zero controls, so the first forward pass is the
    uncontrolled baseline.  Returns an unconverged report (converged=False)
    when max_iterations runs out; integration blow-ups raise
    IntegrationDivergedError.  The reported state and costate trajectories
    are re-integrated under the final controls so the report is a consistent
    sample of the optimality system.
    """
    if not strategy.is_controlled:
        raise ValueError("solve needs a controlled strategy; use solve_uncontrolled")
    x0 = np.asarray(x0, dtype=float)
    if x0.size != strategy.state_dim:
        raise ValueError(f"x0 must have {strategy.state_dim} components, got {x0.size}")
    models.validate_simplex(x0, context="x0")

    grid = settings.grid
    theta = settings.relaxation
    tol = settings.tolerance
    n_nodes = grid.n_nodes
    d = strategy.state_dim
    m = strategy.n_controls

    def f(t, x, u):
        return models.vector_field(strategy, x, u)

    def g(t, phi, x, u):
        return pmp.adjoint_field(strategy, t, phi, x, u)

    def characterized(state: Trajectory, adjoint: Trajectory) -> np.ndarray:
        return np.array(
            [
                pmp.characterize_control(strategy, x, phi)
                for x, phi in zip(state.values, adjoint.values)
            ]
        )

    phi_f = np.zeros(d)
    u = np.zeros((n_nodes, m))
    old_u = np.zeros((n_nodes, m))
    old_x = np.zeros((n_nodes, d))
    old_phi = np.zeros((n_nodes, d))

    converged = False
    iterations = 0
    history: list[float] = []

    while iterations < settings.max_iterations:
        iterations += 1
        state = integrate_forward(f, x0, grid, ControlTrajectory(grid, u))
        adjoint = integrate_backward(g, phi_f, grid, state, ControlTrajectory(grid, u))
        old_u, u = u, theta * characterized(state, adjoint) + (1.0 - theta) * u

        residual = -np.inf
        for new, old in (
            (u, old_u),
            (state.values, old_x),
            (adjoint.values, old_phi),
        ):
            change = np.abs(new - old).sum(axis=0) - tol * np.abs(new).sum(axis=0)
            if change.size:
                residual = max(residual, float(change.max()))
        history.append(residual)
        old_x, old_phi = state.values, adjoint.values
        if residual <= 0.0:
            converged = True
            break

    controls = ControlTrajectory(grid, u)
    state = integrate_forward(f, x0, grid, controls)
    adjoint = integrate_backward(g, phi_f, grid, state, controls)
    return SolveReport(
        strategy=strategy,
        state=state,
        adjoint=adjoint,
        controls=controls,
        objective=evaluate_objective(strategy, state, controls),
        iterations=iterations,
        converged=converged,
        residual_history=tuple(history),
    )
