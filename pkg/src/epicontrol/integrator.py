"""Fixed-step fourth-order Runge-Kutta sweeps over a shared uniform grid.

States are integrated forward in time; costates backward from their terminal
anchor.  Frozen node-sampled signals (controls and, on backward sweeps, the
state trajectory) are exposed to the right-hand side through an accessor that
returns the arithmetic mean of adjacent nodes at half-steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class IntegrationDivergedError(RuntimeError):
    """A Runge-Kutta stage or update produced a non-finite value."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of ``n_steps`` intervals on [t0, tf]; node k sits at t0 + k*h."""

    tf: float
    n_steps: int = 1000
    t0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.tf)):
            raise ValueError("grid endpoints must be finite")
        if self.tf <= self.t0:
            raise ValueError(f"tf must exceed t0, got [{self.t0}, {self.tf}]")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")

    @property
    def h(self) -> float:
        return (self.tf - self.t0) / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    def nodes(self) -> np.ndarray:
        # linspace pins node 0 to t0 and node n_steps to tf exactly
        return np.linspace(self.t0, self.tf, self.n_steps + 1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Node-sampled vector signal; ``values`` has shape (n_steps + 1, d)."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "values", values)
        if values.shape[0] != self.grid.n_nodes:
            raise ValueError(
                f"trajectory needs {self.grid.n_nodes} rows, got shape {values.shape}"
            )
        if not np.isfinite(values).all():
            raise ValueError("trajectory contains non-finite values")

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class ControlTrajectory:
    """Per-node control vectors, each entry in [0, 1]; shape (n_steps + 1, m)."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "values", values)
        if values.shape[0] != self.grid.n_nodes:
            raise ValueError(
                f"control trajectory needs {self.grid.n_nodes} rows, got shape {values.shape}"
            )
        if values.size and not np.isfinite(values).all():
            raise ValueError("control trajectory contains non-finite values")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValueError("control values must lie in [0, 1]")

    @classmethod
    def zeros(cls, grid: TimeGrid, n_controls: int) -> "ControlTrajectory":
        return cls(grid, np.zeros((grid.n_nodes, n_controls)))

    @classmethod
    def constant(cls, grid: TimeGrid, levels) -> "ControlTrajectory":
        levels = np.atleast_1d(np.asarray(levels, dtype=float))
        return cls(grid, np.tile(levels, (grid.n_nodes, 1)))

    @property
    def n_controls(self) -> int:
        return self.values.shape[1]


def rk4_step(f: Callable, t: float, x, aux_at: Callable, h: float):
    """One classical RK4 update x + (h/6)(k1 + 2 k2 + 2 k3 + k4).

    ``f(t, x, aux)`` evaluates the right-hand side; ``aux_at`` supplies the
    frozen auxiliary signals and is queried at t, t + h/2 and t + h.  The
    step ``h`` is signed (negative for backward sweeps).
    """
    if h == 0.0:
        raise ValueError("step size must be nonzero")
    half = 0.5 * h
    k1 = f(t, x, aux_at(t))
    k2 = f(t + half, x + half * k1, aux_at(t + half))
    k3 = f(t + half, x + half * k2, aux_at(t + half))
    k4 = f(t + h, x + h * k3, aux_at(t + h))
    x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_next)):
        raise IntegrationDivergedError(f"non-finite RK4 update at t={t!r}")
    return x_next


def _segment_accessor(t_start: float, h: float, first, mid, last) -> Callable:
    """Accessor over one step: snaps query times to {t, t+h/2, t+h}."""

    def aux_at(tq):
        w = (tq - t_start) / h
        if w < 0.25:
            return first
        if w < 0.75:
            return mid
        return last

    return aux_at


def integrate_forward(
    f: Callable, x0, grid: TimeGrid, controls: ControlTrajectory
) -> Trajectory:
    """Forward RK4 sweep; returns a Trajectory whose first node equals x0.

    ``f(t, x, u)`` receives the control vector at each stage; control values
    at half-steps are means of the adjacent node values.
    """
    if controls.grid != grid:
        raise ValueError("controls are sampled on a different grid")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    u = controls.values
    times = grid.nodes()
    h = grid.h
    out = np.empty((grid.n_nodes, x.size))
    out[0] = x
    for k in range(grid.n_steps):
        aux_at = _segment_accessor(times[k], h, u[k], 0.5 * (u[k] + u[k + 1]), u[k + 1])
        try:
            x = rk4_step(f, times[k], x, aux_at, h)
        except IntegrationDivergedError as exc:
            raise IntegrationDivergedError(
                f"forward integration diverged at node {k + 1}"
            ) from exc
        out[k + 1] = x
    return Trajectory(grid, out)


def integrate_backward(
    g: Callable,
    phi_f,
    grid: TimeGrid,
    state: Trajectory,
    controls: ControlTrajectory,
) -> Trajectory:
    """Backward RK4 sweep from the terminal anchor; last node equals phi_f.

    ``g(t, phi, x, u)`` is evaluated along the frozen state and control
    trajectories; both are averaged between adjacent nodes at half-steps.
    """
    if state.grid != grid or controls.grid != grid:
        raise ValueError("state/controls are sampled on a different grid")
    phi = np.atleast_1d(np.asarray(phi_f, dtype=float))
    xs = state.values
    us = controls.values
    times = grid.nodes()
    h = grid.h
    out = np.empty((grid.n_nodes, phi.size))
    out[-1] = phi

    def f(t, p, aux):
        x, u = aux
        return g(t, p, x, u)

    for k in range(grid.n_steps - 1, -1, -1):
        aux_at = _segment_accessor(
            times[k + 1],
            -h,
            (xs[k + 1], us[k + 1]),
            (0.5 * (xs[k] + xs[k + 1]), 0.5 * (us[k] + us[k + 1])),
            (xs[k], us[k]),
        )
        try:
            phi = rk4_step(f, times[k + 1], phi, aux_at, -h)
        except IntegrationDivergedError as exc:
            raise IntegrationDivergedError(
                f"backward integration diverged at node {k}"
            ) from exc
        out[k] = phi
    return Trajectory(grid, out)
