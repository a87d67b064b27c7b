import numpy as np
import pytest

from epicontrol import (
    NoAdjointError,
    StrategyTag,
    adjoint_field,
    characterize_control,
    hamiltonian,
    running_cost,
    vector_field,
)

from conftest import CONTROLLED_TAGS, fd_gradient, make_strategy, random_admissible, rel_error


def test_sir_vaccination_adjoint_at_zero_costate():
    # only the infected-class equation carries a source term (-1)
    strategy = make_strategy(StrategyTag.SIR_VACCINATION)
    out = adjoint_field(strategy, 0.0, np.zeros(3), [0.95, 0.05, 0.0], [0.3])
    assert np.array_equal(out, [0.0, -1.0, 0.0])


def test_exposed_weighted_adjoint_at_zero_costate():
    # source terms are the exposed and infected weights: (0, -K1, -K2, 0)
    strategy = make_strategy(StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED)
    out = adjoint_field(strategy, 0.0, np.zeros(4), [0.88, 0.07, 0.05, 0.0], [0.3])
    assert np.array_equal(out, [0.0, -1.0, -5.0, 0.0])


@pytest.mark.parametrize("tag", CONTROLLED_TAGS)
def test_equal_costates_kill_every_difference_term(tag):
    # rows without a constant source vanish when all costates are equal
    strategy = make_strategy(tag)
    rng = np.random.default_rng(5)
    x, u, _ = random_admissible(rng, strategy)
    phi = np.full(strategy.state_dim, 0.37)
    out = adjoint_field(strategy, 0.0, phi, x, u)
    zero_weight_rows = {
        StrategyTag.SIR_VACCINATION: [0, 2],
        StrategyTag.SIR_TREATMENT_EDUCATION: [0, 2],
        StrategyTag.SEIR_VACCINATION: [0, 1, 3],
        StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED: [0, 3],
        StrategyTag.SEIR_TREATMENT_EDUCATION: [0, 1, 3],
    }[tag]
    assert np.array_equal(out[zero_weight_rows], np.zeros(len(zero_weight_rows)))


def test_adjoint_undefined_for_uncontrolled():
    strategy = make_strategy(StrategyTag.SIR_UNCONTROLLED)
    with pytest.raises(NoAdjointError):
        adjoint_field(strategy, 0.0, np.zeros(3), [0.95, 0.05, 0.0], [])
    with pytest.raises(NoAdjointError):
        characterize_control(strategy, [0.95, 0.05, 0.0], np.zeros(3))


@pytest.mark.parametrize("tag", CONTROLLED_TAGS)
def test_zero_costate_characterizes_zero_control(tag):
    strategy = make_strategy(tag)
    u = characterize_control(strategy, strategy.state_dim * [0.25], np.zeros(strategy.state_dim))
    assert np.array_equal(u, np.zeros(strategy.n_controls))


def test_sir_vaccination_characterization_values():
    strategy = make_strategy(StrategyTag.SIR_VACCINATION)
    # saturation at the upper bound
    assert characterize_control(strategy, [0.5, 0.4, 0.1], [10.0, 0.0, 0.0])[0] == 1.0
    # interior: (s/B)(phi1 - phi3) = 0.5 * 1 = 0.5
    assert characterize_control(strategy, [0.5, 0.4, 0.1], [1.0, 0.0, 0.0])[0] == 0.5
    # negative gradient clamps at zero
    assert characterize_control(strategy, [0.5, 0.4, 0.1], [-1.0, 0.0, 0.0])[0] == 0.0


def test_characterization_scale_invariance():
    # scaling (phi1 - phi3) and B together leaves the control unchanged
    base = make_strategy(StrategyTag.SIR_VACCINATION)
    x = [0.6, 0.3, 0.1]
    u1 = characterize_control(base, x, [0.8, 0.0, 0.2])
    from epicontrol import SirParams, Strategy

    scaled = Strategy(StrategyTag.SIR_VACCINATION, SirParams(0.2, 0.1), {"B": 3.0})
    u2 = characterize_control(scaled, x, [3 * 0.8, 0.0, 3 * 0.2])
    assert u1 == pytest.approx(u2, rel=1e-15)


@pytest.mark.parametrize("tag", CONTROLLED_TAGS)
def test_characterized_controls_stay_in_unit_interval(tag):
    strategy = make_strategy(tag)
    rng = np.random.default_rng(17)
    for _ in range(200):
        x = rng.dirichlet(np.ones(strategy.state_dim))
        phi = rng.uniform(-50.0, 50.0, strategy.state_dim)
        u = characterize_control(strategy, x, phi)
        assert (u >= 0.0).all() and (u <= 1.0).all()


def test_hamiltonian_reduces_to_running_cost_at_zero_costate():
    strategy = make_strategy(StrategyTag.SEIR_TREATMENT_EDUCATION)
    x, u = [0.88, 0.07, 0.05, 0.0], [0.2, 0.4]
    assert hamiltonian(strategy, x, u, np.zeros(4)) == running_cost(strategy, x, u)


def test_hamiltonian_zero_control_zero_costate():
    strategy = make_strategy(StrategyTag.SIR_VACCINATION)
    assert hamiltonian(strategy, [0.95, 0.05, 0.0], [0.0], np.zeros(3)) == 0.05


def test_hamiltonian_hand_value_with_equal_costates():
    # equal costates annihilate phi . f (the field sums to zero), leaving
    # i + (B/2) eta^2 = 0.05 + 0.005 = 0.055
    strategy = make_strategy(StrategyTag.SIR_VACCINATION)
    value = hamiltonian(strategy, [0.95, 0.05, 0.0], [0.1], np.ones(3))
    assert value == pytest.approx(0.055, abs=1e-15)


@pytest.mark.parametrize("tag", CONTROLLED_TAGS)
def test_costate_field_matches_hamiltonian_state_gradient(tag):
    strategy = make_strategy(tag)
    rng = np.random.default_rng(101)
    for _ in range(120):
        x, u, phi = random_admissible(rng, strategy)
        formula = adjoint_field(strategy, 0.0, phi, x, u)
        fd = -fd_gradient(lambda v: hamiltonian(strategy, v, u, phi), x)
        assert rel_error(formula, fd) < 1e-6


@pytest.mark.parametrize("tag", CONTROLLED_TAGS)
def test_model_field_matches_hamiltonian_costate_gradient(tag):
    strategy = make_strategy(tag)
    rng = np.random.default_rng(202)
    for _ in range(120):
        x, u, phi = random_admissible(rng, strategy)
        formula = vector_field(strategy, x, u)
        fd = fd_gradient(lambda v: hamiltonian(strategy, x, u, v), phi)
        assert rel_error(formula, fd) < 1e-6


@pytest.mark.parametrize("tag", CONTROLLED_TAGS)
def test_interior_characterized_controls_are_stationary(tag):
    strategy = make_strategy(tag)
    rng = np.random.default_rng(303)
    interior_seen = 0
    for _ in range(300):
        x, _, phi = random_admissible(rng, strategy)
        u_star = characterize_control(strategy, x, phi)
        grad = fd_gradient(lambda v: hamiltonian(strategy, x, v, phi), u_star, eps=1e-5)
        for j in range(strategy.n_controls):
            if 0.0 < u_star[j] < 1.0:
                interior_seen += 1
                assert abs(grad[j]) < 1e-10
    assert interior_seen > 50
