import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bloch, density, lindblad_rhs, random_ball, rk4_density
from qubit_thermometry.core import BathSpec, BlochVector, DomainError, GibbsState, QubitHamiltonian, gibbs_properties
from qubit_thermometry.dynamics import (
    DissipationRates,
    IntegrationError,
    Trajectory,
    analytic_trajectory,
    bloch_time_derivative,
    propagate_analytic,
    propagate_numeric,
    rates_from_bath,
    stationary_state,
)

H1 = QubitHamiltonian(1.0)
REFERENCE_BATH = BathSpec(0.5, 1.0, 0.0)


def test_rates_at_reference_parameters():
    r = rates_from_bath(REFERENCE_BATH, H1)
    assert r.occupation == pytest.approx(0.156517642749666, abs=1e-12)
    assert r.gamma_p == pytest.approx(1.313035285499331, abs=1e-12)
    assert r.gamma_m == -1.0
    assert r.gamma_plus / r.gamma_minus == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert r.gamma_p == pytest.approx(r.gamma_plus + r.gamma_minus, abs=1e-15)


def test_rates_vacuum_limit():
    r = rates_from_bath(BathSpec(1e-4, 0.7), H1)
    assert r.gamma_plus == 0.0
    assert r.gamma_minus == pytest.approx(0.7)
    assert r.gamma_m == -0.7


@given(st.floats(0.05, 10), st.floats(0.1, 3), st.floats(0.3, 3))
def test_detailed_balance(temperature, gamma, omega):
    r = rates_from_bath(BathSpec(temperature, gamma), QubitHamiltonian(omega))
    assert r.gamma_minus > r.gamma_plus > 0 or r.gamma_plus == 0
    assert r.gamma_plus / r.gamma_minus == pytest.approx(math.exp(-omega / temperature), rel=1e-10)


def test_derivative_examples():
    r = rates_from_bath(REFERENCE_BATH, H1)
    assert bloch_time_derivative(stationary_state(r), r, H1) == pytest.approx([0, 0, 0], abs=1e-15)
    zero = DissipationRates.from_channels(0.0, 0.0)
    assert bloch_time_derivative(BlochVector(1, 0, 0), zero, H1) == pytest.approx([0, 1, 0])
    rd = bloch_time_derivative(BlochVector(0.4, 0, -0.4), r, H1)
    assert rd[2] == pytest.approx(-0.474785885800267, abs=1e-12)


def test_derivative_matches_master_equation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        r0 = random_ball(rng)
        temperature, gamma, gamma0 = rng.uniform(0.1, 5), rng.uniform(0.1, 2), rng.uniform(0, 1)
        rates = rates_from_bath(BathSpec(temperature, gamma, gamma0), H1)
        expected = bloch(lindblad_rhs(density(r0), temperature, gamma, gamma0))
        assert bloch_time_derivative(r0, rates, H1) == pytest.approx(expected, abs=1e-12)


def test_analytic_examples():
    r = rates_from_bath(REFERENCE_BATH, H1)
    s0 = BlochVector(0.4, 0.1, -0.4)
    assert propagate_analytic(s0, r, H1, 0.0) == s0
    # frozen from an mpmath evaluation and a scalar RK4 loop at step 1e-4
    assert propagate_analytic(BlochVector(0, 0, -0.4), r, H1, 1.0).rz == pytest.approx(-0.664324490137950, abs=1e-12)
    late = propagate_analytic(s0, r, H1, 50.0)
    assert late.as_array() == pytest.approx([0, 0, -math.tanh(1.0)], abs=1e-10)


def test_analytic_matches_density_matrix_rk4():
    rng = np.random.default_rng(11)
    for _ in range(5):
        r0 = random_ball(rng)
        temperature, gamma, gamma0 = rng.uniform(0.2, 3), rng.uniform(0.2, 1.5), rng.uniform(0, 0.8)
        rates = rates_from_bath(BathSpec(temperature, gamma, gamma0), H1)
        expected = rk4_density(r0, temperature, gamma, gamma0, 2.0)
        got = propagate_analytic(BlochVector.from_array(r0), rates, H1, 2.0).as_array()
        assert got == pytest.approx(expected, abs=1e-9)


def test_numeric_examples():
    r = rates_from_bath(REFERENCE_BATH, H1)
    zero = DissipationRates.from_channels(0.0, 0.0)
    const = propagate_numeric(BlochVector(0, 0, 0.3), zero, H1, np.linspace(0, 5, 11))
    assert np.all(const.states == [0, 0, 0.3])
    traj = propagate_numeric(BlochVector(0, 0, -0.4), r, H1, [0.0, 1.0])
    assert traj.states[-1, 2] == pytest.approx(-0.664324490137950, abs=1e-8)
    fixed = propagate_numeric(stationary_state(r), r, H1, np.linspace(0, 10, 21))
    assert np.max(np.abs(fixed.states - stationary_state(r).as_array())) < 1e-10


def test_numeric_converges_under_step_halving():
    r = rates_from_bath(REFERENCE_BATH, H1)
    s0 = BlochVector(0.6, 0.2, -0.1)
    exact = propagate_analytic(s0, r, H1, 3.0).as_array()
    errs = [
        np.max(np.abs(propagate_numeric(s0, r, H1, [0.0, 3.0], max_substep=dt).states[-1] - exact))
        for dt in (0.2, 0.1)
    ]
    assert 12 < errs[0] / errs[1] < 20


def test_numeric_integration_instability_raises():
    r = rates_from_bath(REFERENCE_BATH, H1)
    with pytest.raises(IntegrationError):
        propagate_numeric(BlochVector(0.99, 0, 0), r, QubitHamiltonian(50.0), [0.0, 10.0], max_substep=0.5)


def test_stationary_state():
    r = rates_from_bath(REFERENCE_BATH, H1)
    assert stationary_state(r).as_array() == pytest.approx([0, 0, -0.761594155955765], abs=1e-12)
    hot = rates_from_bath(BathSpec(1e8, 1.0), H1)
    assert stationary_state(hot).rz == pytest.approx(0, abs=1e-8)
    with pytest.raises(DomainError):
        stationary_state(DissipationRates.from_channels(0.0, 0.0))


def test_stationary_matches_gibbs():
    rng = np.random.default_rng(5)
    for temperature in rng.uniform(0.05, 10, 20):
        r = rates_from_bath(BathSpec(temperature, 1.0), H1)
        g = gibbs_properties(GibbsState(1 / temperature)).bloch
        assert stationary_state(r).isclose(g, atol=1e-12)


def _random_setup(rng):
    s0 = BlochVector.from_array(random_ball(rng))
    bath = BathSpec(rng.uniform(0.1, 5), rng.uniform(0.1, 2), rng.uniform(0, 1))
    return s0, rates_from_bath(bath, H1)


def test_contractivity():
    rng = np.random.default_rng(7)
    times = np.linspace(0, 10, 401)
    for _ in range(50):
        s0, r = _random_setup(rng)
        norms = np.linalg.norm(analytic_trajectory(s0, r, H1, times).states, axis=1)
        bound = np.maximum.accumulate(norms)
        assert np.all(norms[1:] <= np.maximum(bound[:-1], abs(stationary_state(r).rz)) + 1e-9)


def test_coherence_decay_law():
    rng = np.random.default_rng(8)
    times = np.linspace(0, 10, 101)
    for _ in range(20):
        s0, r = _random_setup(rng)
        traj = analytic_trajectory(s0, r, H1, times)
        coh = 0.5 * np.hypot(traj.states[:, 0], traj.states[:, 1])
        expected = abs(s0.coherence) * np.exp(-r.transverse_rate * times)
        assert np.max(np.abs(coh - expected)) < 1e-12


def test_population_coherence_decoupling():
    r = rates_from_bath(BathSpec(0.7, 1.2, 0.4), H1)
    times = np.linspace(0, 10, 201)
    a = analytic_trajectory(BlochVector(0.0, 0.0, 0.2), r, H1, times)
    b = analytic_trajectory(BlochVector(0.5, -0.6, 0.2), r, H1, times)
    assert np.array_equal(a.states[:, 2], b.states[:, 2])


def test_thermalization():
    rng = np.random.default_rng(9)
    for _ in range(30):
        s0, r = _random_setup(rng)
        target = stationary_state(r)
        # populations relax at gamma_p, coherences only at gamma_p / 2 + 2 gamma0
        assert propagate_analytic(s0, r, H1, 30.0 / r.gamma_p).rz == pytest.approx(target.rz, abs=1e-10)
        diagonal = BlochVector(0.0, 0.0, s0.rz)
        assert propagate_analytic(diagonal, r, H1, 30.0 / r.gamma_p).isclose(target, atol=1e-10)
        assert propagate_analytic(s0, r, H1, 30.0 / min(r.gamma_p, r.transverse_rate)).isclose(target, atol=1e-10)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [[0, 0, 0], [0, 0, 0]])
    with pytest.raises(ValueError):
        Trajectory([-1.0, 0.0], [[0, 0, 0], [0, 0, 0]])
    clamped = Trajectory([0.0], [[0, 0, 1 + 1e-8]])
    assert np.linalg.norm(clamped.states[0]) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(IntegrationError):
        Trajectory([0.0], [[0, 0, 1.01]])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 2), st.floats(0, 1), st.floats(0, 10))
def test_analytic_vs_numeric_property(temperature, gamma, gamma0, t):
    r = rates_from_bath(BathSpec(temperature, gamma, gamma0), H1)
    s0 = BlochVector(0.5, -0.3, 0.6)
    grid = [t] if t > 0 else [0.0]
    num = propagate_numeric(s0, r, H1, grid).states[-1]
    assert num == pytest.approx(propagate_analytic(s0, r, H1, grid[0]).as_array(), abs=1e-6)
