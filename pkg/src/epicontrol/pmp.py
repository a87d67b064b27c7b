"""Costate dynamics, Hamiltonians, and clamped control characterizations.

Each controlled strategy carries a first-order optimality system: costates
phi obey dphi/dt = -dH/dx with zero terminal conditions, and the optimal
control is the stationary point of H in the control, projected onto [0, 1].
The Hamiltonian here is assembled from the running cost and the model field,
so the hand-written costate formulas below can be cross-checked against its
finite differences.
"""

from __future__ import annotations

import numpy as np

from . import models
from .models import Strategy, StrategyTag


class NoAdjointError(ValueError):
    """The strategy has no costate system (it carries no control)."""


def _clamp01(value: float) -> float:
    return min(max(0.0, value), 1.0)


def adjoint_field(strategy: Strategy, t: float, phi, x, u) -> np.ndarray:
    """Right-hand side of the costate system along frozen state x and control u.

    The fields are autonomous; ``t`` is accepted for interface uniformity.
    """
    tag = strategy.tag
    p = strategy.params
    w = strategy.weights
    if tag is StrategyTag.SIR_VACCINATION:
        phi1, phi2, phi3 = phi[0], phi[1], phi[2]
        s, i = x[0], x[1]
        return np.array(
            [
                p.nu * i * (phi1 - phi2) + u[0] * (phi1 - phi3),
                -1.0 + p.nu * s * (phi1 - phi2) + p.delta * (phi2 - phi3),
                0.0,
            ]
        )
    if tag is StrategyTag.SIR_TREATMENT_EDUCATION:
        phi1, phi2, phi3 = phi[0], phi[1], phi[2]
        s, i = x[0], x[1]
        return np.array(
            [
                p.nu * i * (phi1 - phi2) + u[1] * (phi1 - phi3),
                -w["C1"]
                + p.nu * s * (phi1 - phi2)
                + p.delta * (phi2 - phi3)
                + u[0] * (phi2 - phi3),
                0.0,
            ]
        )
    if tag is StrategyTag.SEIR_VACCINATION:
        phi1, phi2, phi3, phi4 = phi[0], phi[1], phi[2], phi[3]
        s, i = x[0], x[2]
        return np.array(
            [
                p.nu * i * (phi1 - phi2) + u[0] * (phi1 - phi4),
                p.rho * (phi2 - phi3),
                -1.0 + p.nu * s * (phi1 - phi2) + p.delta * (phi3 - phi4),
                0.0,
            ]
        )
    if tag is StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED:
        phi1, phi2, phi3, phi4 = phi[0], phi[1], phi[2], phi[3]
        s, i = x[0], x[2]
        return np.array(
            [
                p.nu * i * (phi1 - phi2) + u[0] * (phi1 - phi4),
                -w["K1"] + p.rho * (phi2 - phi3),
                -w["K2"] + p.nu * s * (phi1 - phi2) + p.delta * (phi3 - phi4),
                0.0,
            ]
        )
    if tag is StrategyTag.SEIR_TREATMENT_EDUCATION:
        phi1, phi2, phi3, phi4 = phi[0], phi[1], phi[2], phi[3]
        s, i = x[0], x[2]
        return np.array(
            [
                p.nu * i * (phi1 - phi2) + u[1] * (phi1 - phi4),
                p.rho * (phi2 - phi3),
                -w["D1"]
                + p.nu * s * (phi1 - phi2)
                + p.delta * (phi3 - phi4)
                + u[0] * (phi3 - phi4),
                0.0,
            ]
        )
    raise NoAdjointError(f"no costate system for uncontrolled strategy {tag.value}")


def characterize_control(strategy: Strategy, x, phi) -> np.ndarray:
    """Clamped stationary control(s) of the Hamiltonian at (x, phi)."""
    tag = strategy.tag
    w = strategy.weights
    if tag is StrategyTag.SIR_VACCINATION:
        return np.array([_clamp01(x[0] / w["B"] * (phi[0] - phi[2]))])
    if tag is StrategyTag.SIR_TREATMENT_EDUCATION:
        return np.array(
            [
                _clamp01(x[1] / w["C2"] * (phi[1] - phi[2])),
                _clamp01(x[0] / w["C3"] * (phi[0] - phi[2])),
            ]
        )
    if tag is StrategyTag.SEIR_VACCINATION:
        return np.array([_clamp01(x[0] / w["D"] * (phi[0] - phi[3]))])
    if tag is StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED:
        return np.array([_clamp01(x[0] / w["K3"] * (phi[0] - phi[3]))])
    if tag is StrategyTag.SEIR_TREATMENT_EDUCATION:
        return np.array(
            [
                _clamp01(x[2] / w["D2"] * (phi[2] - phi[3])),
                _clamp01(x[0] / w["D3"] * (phi[0] - phi[3])),
            ]
        )
    raise NoAdjointError(f"no control characterization for {tag.value}")


def hamiltonian(strategy: Strategy, x, u, phi) -> float:
    """Running cost plus costate-weighted dynamics: L(x, u) + phi . f(x, u)."""
    f = models.vector_field(strategy, x, u)
    return models.running_cost(strategy, x, u) + float(np.dot(phi, f))
