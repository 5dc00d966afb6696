import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_ball
from qubit_thermometry.core import BathSpec, BlochVector, GibbsState, QubitHamiltonian, gibbs_properties, heat_capacity
from qubit_thermometry.dynamics import propagate_analytic, rates_from_bath
from qubit_thermometry.metrology import (
    FiniteDifferenceWarning,
    SingularStateError,
    TemperatureDerivative,
    dbloch_dT_analytic,
    dbloch_dT_numeric,
    gamma_p_temperature_derivative,
    qcrb_variance_bound,
    qfi_bloch,
    qfi_closed_form,
    thermal_qfi,
)

H1 = QubitHamiltonian(1.0)
REFERENCE_BATH = BathSpec(0.5, 1.0, 0.0)
THERMAL_QFI = 1.679897366456104
COHERENT = BlochVector(0.8, 0.0, -0.4)
INCOHERENT = BlochVector(0.0, 0.0, -0.4)


def test_gamma_p_derivative():
    # 2 e^2 / (0.25 (e^2 - 1)^2)
    assert gamma_p_temperature_derivative(REFERENCE_BATH, H1) == pytest.approx(1.448123321932621, abs=1e-12)
    step = 1e-6

    def gp(t):
        return rates_from_bath(BathSpec(t, 1.0), H1).gamma_p

    fd = (gp(0.5 + step) - gp(0.5 - step)) / (2 * step)
    assert fd == pytest.approx(1.448123321932621, rel=1e-8)
    assert gamma_p_temperature_derivative(BathSpec(1e-3, 1.0), H1) == 0.0


def test_derivative_zero_at_start():
    zero = [0.0, 0.0, 0.0]
    assert dbloch_dT_analytic(COHERENT, REFERENCE_BATH, H1, 0.0).as_array() == pytest.approx(zero, abs=1e-15)
    assert dbloch_dT_numeric(COHERENT, REFERENCE_BATH, H1, 0.0).as_array() == pytest.approx(zero, abs=1e-15)
    with pytest.raises(ValueError):
        dbloch_dT_analytic(COHERENT, REFERENCE_BATH, H1, -1.0)


def test_analytic_matches_numeric_random():
    rng = np.random.default_rng(41)
    for _ in range(50):
        s0 = BlochVector.from_array(random_ball(rng))
        bath = BathSpec(rng.uniform(0.2, 3), rng.uniform(0.2, 2), rng.uniform(0, 1))
        t = rng.uniform(0, 10)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FiniteDifferenceWarning)
            num = dbloch_dT_numeric(s0, bath, H1, t).as_array()
        ana = dbloch_dT_analytic(s0, bath, H1, t).as_array()
        assert ana == pytest.approx(num, abs=1e-5)


def test_analytic_matches_numeric_fig1_sweep():
    bath = BathSpec(0.5, 1.0, 0.2)
    for t in np.linspace(0, 10, 41):
        ana = dbloch_dT_analytic(COHERENT, bath, H1, t).as_array()
        num = dbloch_dT_numeric(COHERENT, bath, H1, t).as_array()
        assert ana == pytest.approx(num, abs=1e-5)


def test_numeric_derivative_second_order():
    exact = dbloch_dT_analytic(COHERENT, REFERENCE_BATH, H1, 2.0).as_array()
    errs = [
        np.max(np.abs(dbloch_dT_numeric(COHERENT, REFERENCE_BATH, H1, 2.0, step=s).as_array() - exact))
        for s in (0.02, 0.01)
    ]
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_numeric_derivative_warns_on_large_step():
    with pytest.warns(FiniteDifferenceWarning):
        dbloch_dT_numeric(COHERENT, REFERENCE_BATH, H1, 2.0, step=0.4)
    with pytest.raises(ValueError):
        dbloch_dT_numeric(COHERENT, REFERENCE_BATH, H1, 2.0, step=0.6)


def test_qfi_bloch_examples():
    zero = TemperatureDerivative(0.0, 0.0, 0.0)
    assert qfi_bloch(COHERENT, zero) == 0.0
    assert qfi_bloch(BlochVector(0, 0, 0), TemperatureDerivative(0, 0, 0.7)) == pytest.approx(0.49)
    thermal = gibbs_properties(GibbsState(2.0)).bloch
    late = dbloch_dT_analytic(thermal, REFERENCE_BATH, H1, 60.0)
    assert qfi_bloch(thermal, late) == pytest.approx(THERMAL_QFI, abs=1e-10)


def test_qfi_bloch_pure_states():
    pure = BlochVector(0.0, 0.0, -1.0)
    assert qfi_bloch(pure, TemperatureDerivative(0.3, 0.4, 0.0)) == pytest.approx(0.25)
    with pytest.raises(SingularStateError):
        qfi_bloch(pure, TemperatureDerivative(0.0, 0.0, 0.1))


def test_closed_form_examples():
    assert qfi_closed_form(COHERENT, REFERENCE_BATH, H1, 0.0) == 0.0
    for s0 in (COHERENT, INCOHERENT, BlochVector(0.1, -0.5, 0.7)):
        assert qfi_closed_form(s0, REFERENCE_BATH, H1, 50.0) == pytest.approx(THERMAL_QFI, abs=1e-6)
    with pytest.raises(ValueError):
        qfi_closed_form(COHERENT, REFERENCE_BATH, H1, -0.5)


def test_closed_form_matches_bloch_formula():
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 60:
        s0 = BlochVector.from_array(random_ball(rng))
        bath = BathSpec(rng.uniform(0.2, 3), rng.uniform(0.2, 2), rng.uniform(0, 1))
        t = rng.uniform(0.05, 10)
        state = propagate_analytic(s0, rates_from_bath(bath, H1), H1, t)
        if state.norm >= 0.999:
            continue
        checked += 1
        via_bloch = qfi_bloch(state, dbloch_dT_analytic(s0, bath, H1, t))
        assert qfi_closed_form(s0, bath, H1, t) == pytest.approx(via_bloch, rel=1e-8)


def test_dephasing_irrelevant_without_coherence():
    for t in np.linspace(0, 10, 21):
        values = [qfi_closed_form(INCOHERENT, BathSpec(0.5, 1.0, g), H1, t) for g in (0, 0.2, 0.5, 2)]
        assert max(values) - min(values) <= 1e-12


def test_stationary_limit():
    rng = np.random.default_rng(43)
    for _ in range(20):
        s0 = BlochVector.from_array(random_ball(rng))
        bath = BathSpec(rng.uniform(0.2, 3), rng.uniform(0.2, 2), rng.uniform(0, 1))
        t = 40.0 / rates_from_bath(bath, H1).gamma_p
        assert qfi_closed_form(s0, bath, H1, t) == pytest.approx(thermal_qfi(bath, H1), abs=1e-8)


def test_coherence_advantage():
    times = np.linspace(0, 10, 1001)[1:]
    coherent = np.array([qfi_closed_form(COHERENT, REFERENCE_BATH, H1, t) for t in times])
    incoherent = np.array([qfi_closed_form(INCOHERENT, REFERENCE_BATH, H1, t) for t in times])
    assert np.any((coherent > incoherent) & (coherent > THERMAL_QFI))
    assert coherent.max() > THERMAL_QFI


def test_dephasing_monotonicity():
    times = np.linspace(0, 10, 201)
    curves = np.array(
        [[qfi_closed_form(COHERENT, BathSpec(0.5, 1.0, g), H1, t) for t in times] for g in np.linspace(0, 2, 11)]
    )
    assert np.all(np.diff(curves, axis=0) <= 1e-15)
    assert np.all(curves >= 0)


def test_thermal_qfi():
    assert thermal_qfi(REFERENCE_BATH, H1) == pytest.approx(THERMAL_QFI, abs=1e-12)
    assert thermal_qfi(BathSpec(1e6, 1.0), H1) < 1e-20
    assert thermal_qfi(BathSpec(1e-3, 1.0), H1) == 0.0
    rng = np.random.default_rng(44)
    for temperature, omega in zip(rng.uniform(0.1, 5, 20), rng.uniform(0.3, 3, 20)):
        h = QubitHamiltonian(omega)
        bath = BathSpec(temperature, 1.0)
        f = thermal_qfi(bath, h)
        assert f == pytest.approx(heat_capacity(GibbsState(1 / temperature, omega)) / temperature**2, rel=1e-12)
        thermal = gibbs_properties(GibbsState(1 / temperature, omega)).bloch
        # d/dT of the Gibbs vector, through the long-time analytic derivative
        deriv = dbloch_dT_analytic(thermal, bath, h, 80.0 / rates_from_bath(bath, h).gamma_p)
        assert qfi_bloch(thermal, deriv) == pytest.approx(f, rel=1e-9)


def test_qcrb():
    assert qcrb_variance_bound(THERMAL_QFI, 100) == pytest.approx(0.00595274461385454, rel=1e-12)
    assert qcrb_variance_bound(1.0) == 1.0
    assert qcrb_variance_bound(2.0, 20) == pytest.approx(qcrb_variance_bound(2.0, 10) / 2)
    assert qcrb_variance_bound(0.0) == math.inf
    with pytest.raises(ValueError):
        qcrb_variance_bound(1.0, 0)
    with pytest.raises(ValueError):
        qcrb_variance_bound(-1.0)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.2, 3), st.floats(0.2, 2), st.floats(0, 1), st.floats(0, 10), st.floats(0, 0.99), st.floats(0, math.pi)
)
def test_qfi_nonnegative(temperature, gamma, gamma0, t, radius, theta):
    s0 = BlochVector(radius * math.sin(theta), 0.0, radius * math.cos(theta))
    assert qfi_closed_form(s0, BathSpec(temperature, gamma, gamma0), H1, t) >= 0
