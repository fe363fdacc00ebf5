"""Two-point counting moments, correlation term and the trade-off."""

import math

import numpy as np
import pytest

from qbattery.dynamics import heisenberg_observable
from qbattery.operators import (
    BatteryModel,
    KBody,
    SingleQubit,
    build_battery_hamiltonian,
    charging_drive,
    power_counting_observable,
    spectral_decompose,
)
from qbattery.statistics import (
    MomentPair,
    StatisticsError,
    correlation_f,
    fcs_moments,
    finite_difference_moments,
    generating_function,
    nsr,
    nsr_defined,
    tradeoff_terms,
)

# Single qubit, omega0 = Omega0 = 1: mean work sin^2(t), variance
# (1/4) sin^2(2t); frozen at t = pi/8.
MEAN_W_PI8 = 0.14644660940672623
VAR_W_PI8 = 0.125

# f for the power observable is 4 cot(2t) csc(2t); +/- 4 sqrt(2) at pi/8
# and 3 pi/8.
F_POWER_PI8 = 5.656854249492381


@pytest.fixture(scope="module")
def qubit():
    model = BatteryModel(n_qubits=1, omega0=1.0, scheme=SingleQubit(Omega0=1.0))
    spec = spectral_decompose(charging_drive(model))
    hb = build_battery_hamiltonian(1, 1.0)
    p0 = power_counting_observable(hb, charging_drive(model))
    psi0 = np.array([1.0, 0.0], dtype=complex)
    return spec, hb, p0, psi0


def test_work_moments_frozen(qubit):
    spec, hb, _, psi0 = qubit
    w_t = heisenberg_observable(spec, hb, math.pi / 8)
    m = fcs_moments(hb, w_t, psi0)
    assert m.mean == pytest.approx(MEAN_W_PI8, abs=1e-12)
    assert m.variance == pytest.approx(VAR_W_PI8, abs=1e-12)


def test_nsr_values():
    assert nsr(MomentPair(2.0, 1.0)) == pytest.approx(0.25)
    undefined = MomentPair(1e-15, 0.5)
    assert not nsr_defined(undefined)
    assert math.isinf(nsr(undefined))


def test_nsr_at_quarter_period(qubit):
    spec, hb, _, psi0 = qubit
    w_t = heisenberg_observable(spec, hb, math.pi / 4)
    m = fcs_moments(hb, w_t, psi0)
    assert nsr(m) == pytest.approx(1.0, abs=1e-12)


def test_correlation_work_eigenstate_is_zero(qubit):
    spec, hb, _, psi0 = qubit
    # psi0 is an eigenstate of the battery observable, so the correlation
    # term collapses to zero identically.
    for t in (0.3, math.pi / 4, 1.2):
        w_t = heisenberg_observable(spec, hb, t)
        assert correlation_f(hb, w_t, psi0) == 0.0


def test_correlation_power_signed(qubit):
    spec, _, p0, psi0 = qubit
    p_t = heisenberg_observable(spec, p0, math.pi / 8)
    assert correlation_f(p0, p_t, psi0) == pytest.approx(F_POWER_PI8, abs=1e-10)
    p_t = heisenberg_observable(spec, p0, 3 * math.pi / 8)
    assert correlation_f(p0, p_t, psi0) == pytest.approx(-F_POWER_PI8, abs=1e-10)


def test_correlation_undefined_when_mean_vanishes(qubit):
    spec, _, p0, psi0 = qubit
    # Mean power crosses zero at t = pi/2.
    p_t = heisenberg_observable(spec, p0, math.pi / 2)
    assert math.isnan(correlation_f(p0, p_t, psi0))


def test_tradeoff_saturates_for_single_qubit(qubit):
    spec, hb, p0, psi0 = qubit
    t = math.pi / 8
    w_t = heisenberg_observable(spec, hb, t)
    p_t = heisenberg_observable(spec, p0, t)
    terms = tradeoff_terms(p_t, w_t, p0, hb, psi0)
    assert terms.defined
    assert terms.lhs == pytest.approx(terms.rhs, abs=1e-10)
    # cot^2 * tan^2 = 1 for the single qubit at every defined point
    assert terms.lhs == pytest.approx(1.0, abs=1e-10)


def test_tradeoff_undefined_at_start(qubit):
    spec, hb, p0, psi0 = qubit
    w_t = heisenberg_observable(spec, hb, 0.0)
    p_t = heisenberg_observable(spec, p0, 0.0)
    terms = tradeoff_terms(p_t, w_t, p0, hb, psi0)
    assert not terms.defined
    assert math.isnan(terms.lhs)


def test_generating_function_zero_at_chi_zero(qubit):
    spec, hb, _, psi0 = qubit
    assert generating_function(hb, spec, psi0, 0.0, 0.7) == pytest.approx(0.0)


def test_finite_difference_matches_quadratic_forms():
    model = BatteryModel(n_qubits=2, omega0=1.3, scheme=KBody(k=2, Omega0=0.6))
    spec = spectral_decompose(charging_drive(model))
    hb = build_battery_hamiltonian(2, 1.3)
    psi0 = np.zeros(4, dtype=complex)
    psi0[0] = 1.0
    t = 0.8
    w_t = heisenberg_observable(spec, hb, t)
    exact = fcs_moments(hb, w_t, psi0)
    mean_fd, var_fd = finite_difference_moments(hb, spec, psi0, t)
    assert mean_fd == pytest.approx(exact.mean, abs=1e-6)
    assert var_fd == pytest.approx(exact.variance, abs=1e-5)


def test_non_hermitian_expectation_rejected():
    skew = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    psi0 = np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2)
    with pytest.raises(StatisticsError):
        fcs_moments(np.zeros((2, 2), dtype=complex), skew, psi0)
