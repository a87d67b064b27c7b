"""Shared builders and finite-difference oracles for the test suite."""

from __future__ import annotations

import numpy as np

from epicontrol import SeirParams, SirParams, Strategy, StrategyTag

SIR_X0 = (0.95, 0.05, 0.0)
SEIR_X0 = (0.88, 0.07, 0.05, 0.0)

SIR_PARAMS = SirParams(nu=0.2, delta=0.1)
SEIR_PARAMS = SeirParams(nu=0.2, rho=0.1887, delta=0.1)

REFERENCE_WEIGHTS = {
    StrategyTag.SIR_UNCONTROLLED: {},
    StrategyTag.SIR_VACCINATION: {"B": 1.0},
    StrategyTag.SIR_TREATMENT_EDUCATION: {"C1": 1.0, "C2": 5.0, "C3": 5.0},
    StrategyTag.SEIR_UNCONTROLLED: {},
    StrategyTag.SEIR_VACCINATION: {"D": 5.0},
    StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED: {"K1": 1.0, "K2": 5.0, "K3": 5.0},
    StrategyTag.SEIR_TREATMENT_EDUCATION: {"D1": 1.0, "D2": 5.0, "D3": 5.0},
}

CONTROLLED_TAGS = tuple(t for t in StrategyTag if REFERENCE_WEIGHTS[t])
ALL_TAGS = tuple(StrategyTag)


def make_strategy(tag: StrategyTag) -> Strategy:
    """Strategy at the reference parameter/weight values."""
    params = SIR_PARAMS if tag.value.startswith("sir") else SEIR_PARAMS
    return Strategy(tag, params, REFERENCE_WEIGHTS[tag])


def x0_for(tag: StrategyTag) -> np.ndarray:
    return np.array(SIR_X0 if tag.value.startswith("sir") else SEIR_X0)


def random_admissible(rng: np.random.Generator, strategy: Strategy):
    """A random (state on the simplex, controls in [0,1], costate) triple."""
    x = rng.dirichlet(np.ones(strategy.state_dim))
    u = rng.random(strategy.n_controls)
    phi = rng.uniform(-2.0, 2.0, strategy.state_dim)
    return x, u, phi


def fd_gradient(fun, v: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function of a vector."""
    v = np.asarray(v, dtype=float)
    grad = np.empty_like(v)
    for j in range(v.size):
        step = np.zeros_like(v)
        step[j] = eps
        grad[j] = (fun(v + step) - fun(v - step)) / (2.0 * eps)
    return grad


def rel_error(got: np.ndarray, want: np.ndarray) -> float:
    """Max componentwise deviation relative to the larger of 1 and the scale."""
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    scale = max(1.0, float(np.abs(want).max()))
    return float(np.abs(got - want).max() / scale)
