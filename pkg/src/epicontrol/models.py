"""Scaled SIR and SEIR epidemic dynamics and their controlled variants.

States are proportion vectors on the probability simplex: (s, i, r) for SIR
and (s, e, i, r) for SEIR.  Controls are intervention intensities in [0, 1]:
a single vaccination rate, or a (treatment, educational-campaign) pair.
Vaccination and education move mass s -> r, treatment moves mass i -> r, so
every field conserves the component sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence, Union

import numpy as np


class StrategyTag(str, Enum):
    SIR_UNCONTROLLED = "sir_uncontrolled"
    SIR_VACCINATION = "sir_vaccination"
    SIR_TREATMENT_EDUCATION = "sir_treatment_education"
    SEIR_UNCONTROLLED = "seir_uncontrolled"
    SEIR_VACCINATION = "seir_vaccination"
    SEIR_VACCINATION_EXPOSED_WEIGHTED = "seir_vaccination_exposed_weighted"
    SEIR_TREATMENT_EDUCATION = "seir_treatment_education"


_SIR_TAGS = frozenset(
    {
        StrategyTag.SIR_UNCONTROLLED,
        StrategyTag.SIR_VACCINATION,
        StrategyTag.SIR_TREATMENT_EDUCATION,
    }
)

#: control weights each objective requires, keyed by strategy
REQUIRED_WEIGHTS = {
    StrategyTag.SIR_UNCONTROLLED: (),
    StrategyTag.SIR_VACCINATION: ("B",),
    StrategyTag.SIR_TREATMENT_EDUCATION: ("C1", "C2", "C3"),
    StrategyTag.SEIR_UNCONTROLLED: (),
    StrategyTag.SEIR_VACCINATION: ("D",),
    StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED: ("K1", "K2", "K3"),
    StrategyTag.SEIR_TREATMENT_EDUCATION: ("D1", "D2", "D3"),
}

_N_CONTROLS = {
    StrategyTag.SIR_UNCONTROLLED: 0,
    StrategyTag.SIR_VACCINATION: 1,
    StrategyTag.SIR_TREATMENT_EDUCATION: 2,
    StrategyTag.SEIR_UNCONTROLLED: 0,
    StrategyTag.SEIR_VACCINATION: 1,
    StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED: 1,
    StrategyTag.SEIR_TREATMENT_EDUCATION: 2,
}


def is_sir(tag: StrategyTag) -> bool:
    return tag in _SIR_TAGS


def state_dim(tag: StrategyTag) -> int:
    return 3 if is_sir(tag) else 4


def n_controls(tag: StrategyTag) -> int:
    return _N_CONTROLS[tag]


def compartment_names(tag: StrategyTag) -> tuple[str, ...]:
    return ("s", "i", "r") if is_sir(tag) else ("s", "e", "i", "r")


def infected_index(tag: StrategyTag) -> int:
    return 1 if is_sir(tag) else 2


def control_names(tag: StrategyTag) -> tuple[str, ...]:
    if _N_CONTROLS[tag] == 0:
        return ()
    if _N_CONTROLS[tag] == 1:
        return ("vaccination",)
    return ("treatment", "education")


def uncontrolled_tag(tag: StrategyTag) -> StrategyTag:
    return StrategyTag.SIR_UNCONTROLLED if is_sir(tag) else StrategyTag.SEIR_UNCONTROLLED


class StrategyArityError(ValueError):
    """Control count does not match the strategy's control structure."""


class InconsistentPopulationError(ValueError):
    """Raw compartment counts do not sum to the stated total population."""


def _check_rate(name: str, value: float) -> None:
    if not (np.isfinite(value) and value >= 0.0):
        raise ValueError(f"{name} must be finite and nonnegative, got {value}")


@dataclass(frozen=True)
class SirParams:
    """Infection rate ``nu`` and recovery rate ``delta``, both per day."""

    nu: float
    delta: float

    def __post_init__(self):
        _check_rate("nu", self.nu)
        _check_rate("delta", self.delta)


@dataclass(frozen=True)
class SeirParams:
    """Transmission rate ``nu``, infectious rate ``rho``, recovery rate ``delta``."""

    nu: float
    rho: float
    delta: float

    def __post_init__(self):
        _check_rate("nu", self.nu)
        _check_rate("rho", self.rho)
        _check_rate("delta", self.delta)


@dataclass(frozen=True)
class Strategy:
    """A model family plus the active control structure and its cost weights."""

    tag: StrategyTag
    params: Union[SirParams, SeirParams]
    weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        tag = StrategyTag(self.tag)
        object.__setattr__(self, "tag", tag)
        wanted = SirParams if is_sir(tag) else SeirParams
        if not isinstance(self.params, wanted):
            raise TypeError(f"{tag.value} requires {wanted.__name__}")
        required = REQUIRED_WEIGHTS[tag]
        if set(self.weights) != set(required):
            raise ValueError(
                f"{tag.value} needs weights {sorted(required)}, got {sorted(self.weights)}"
            )
        for name, value in self.weights.items():
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"weight {name} must be strictly positive, got {value}")
        object.__setattr__(self, "weights", dict(self.weights))

    @property
    def n_controls(self) -> int:
        return _N_CONTROLS[self.tag]

    @property
    def state_dim(self) -> int:
        return state_dim(self.tag)

    @property
    def is_controlled(self) -> bool:
        return self.n_controls > 0

    def uncontrolled(self) -> "Strategy":
        """The family baseline with every control removed."""
        return Strategy(uncontrolled_tag(self.tag), self.params, {})


def scale_population(counts: Sequence[float], total: float) -> np.ndarray:
    """Convert absolute compartment counts to proportions of the total population."""
    counts = np.asarray(counts, dtype=float)
    if not (np.isfinite(total) and total > 0.0):
        raise ValueError(f"total population must be positive, got {total}")
    if counts.size and counts.min() < 0.0:
        raise ValueError("compartment counts must be nonnegative")
    if abs(counts.sum() - total) > 1e-9 * total:
        raise InconsistentPopulationError(
            f"counts sum to {counts.sum()!r}, expected total population {total!r}"
        )
    return counts / total


def validate_simplex(state, atol: float = 1e-9, context: str = "state") -> None:
    """Require proportions in [0, 1] that sum to 1 (within ``atol``)."""
    state = np.asarray(state, dtype=float)
    if not np.isfinite(state).all():
        raise ValueError(f"{context} contains non-finite values")
    if state.min() < -atol or state.max() > 1.0 + atol:
        raise ValueError(f"{context} components must lie in [0, 1], got {state}")
    if abs(state.sum() - 1.0) > atol:
        raise ValueError(f"{context} must sum to 1, got sum {state.sum()!r}")


def _check_controls(strategy: Strategy, controls) -> None:
    if len(controls) != strategy.n_controls:
        raise StrategyArityError(
            f"{strategy.tag.value} takes {strategy.n_controls} control(s), got {len(controls)}"
        )


def sir_field(strategy: Strategy, state, controls) -> np.ndarray:
    """Time derivative of (s, i, r) under the strategy's control structure."""
    if not is_sir(strategy.tag):
        raise StrategyArityError(f"{strategy.tag.value} is not an SIR strategy")
    _check_controls(strategy, controls)
    s, i = state[0], state[1]
    p = strategy.params
    infection = p.nu * s * i
    recovery = p.delta * i
    tag = strategy.tag
    if tag is StrategyTag.SIR_UNCONTROLLED:
        return np.array([-infection, infection - recovery, recovery])
    if tag is StrategyTag.SIR_VACCINATION:
        vaccination = controls[0] * s
        return np.array(
            [-infection - vaccination, infection - recovery, recovery + vaccination]
        )
    treatment = controls[0] * i
    education = controls[1] * s
    return np.array(
        [
            -infection - education,
            infection - recovery - treatment,
            recovery + treatment + education,
        ]
    )


def seir_field(strategy: Strategy, state, controls) -> np.ndarray:
    """Time derivative of (s, e, i, r); exposure always flows s -> e -> i."""
    if is_sir(strategy.tag):
        raise StrategyArityError(f"{strategy.tag.value} is not an SEIR strategy")
    _check_controls(strategy, controls)
    s, e, i = state[0], state[1], state[2]
    p = strategy.params
    infection = p.nu * s * i
    progression = p.rho * e
    recovery = p.delta * i
    tag = strategy.tag
    if tag is StrategyTag.SEIR_UNCONTROLLED:
        return np.array(
            [-infection, infection - progression, progression - recovery, recovery]
        )
    if tag in (StrategyTag.SEIR_VACCINATION, StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED):
        vaccination = controls[0] * s
        return np.array(
            [
                -infection - vaccination,
                infection - progression,
                progression - recovery,
                recovery + vaccination,
            ]
        )
    treatment = controls[0] * i
    education = controls[1] * s
    return np.array(
        [
            -infection - education,
            infection - progression,
            progression - recovery - treatment,
            recovery + treatment + education,
        ]
    )


def vector_field(strategy: Strategy, state, controls) -> np.ndarray:
    """Dispatch to the SIR or SEIR field for the strategy's model family."""
    if is_sir(strategy.tag):
        return sir_field(strategy, state, controls)
    return seir_field(strategy, state, controls)


def running_cost(strategy: Strategy, state, controls) -> float:
    """Pointwise integrand of the strategy's objective functional."""
    _check_controls(strategy, controls)
    tag = strategy.tag
    w = strategy.weights
    if tag is StrategyTag.SIR_VACCINATION:
        return state[1] + 0.5 * w["B"] * controls[0] ** 2
    if tag is StrategyTag.SIR_TREATMENT_EDUCATION:
        return (
            w["C1"] * state[1]
            + 0.5 * w["C2"] * controls[0] ** 2
            + 0.5 * w["C3"] * controls[1] ** 2
        )
    if tag is StrategyTag.SEIR_VACCINATION:
        return state[2] + 0.5 * w["D"] * controls[0] ** 2
    if tag is StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED:
        return w["K1"] * state[1] + w["K2"] * state[2] + 0.5 * w["K3"] * controls[0] ** 2
    if tag is StrategyTag.SEIR_TREATMENT_EDUCATION:
        return (
            w["D1"] * state[2]
            + 0.5 * w["D2"] * controls[0] ** 2
            + 0.5 * w["D3"] * controls[1] ** 2
        )
    raise ValueError(f"no objective integrand for uncontrolled strategy {tag.value}")
