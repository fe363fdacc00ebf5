"""Operator construction: Hamiltonians, Pauli strings, counting observables."""

import numpy as np
import pytest

from qbattery.operators import (
    BatteryModel,
    Custom,
    DimensionCapError,
    IsingS,
    KBody,
    PauliTerm,
    SingleQubit,
    battery_diagonal,
    build_battery_hamiltonian,
    build_charging_hamiltonian,
    charging_drive,
    pauli_string,
    power_counting_observable,
    power_from_battery_diagonal,
    require_hermitian,
    spectral_decompose,
    total_with_spectrum,
)

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
I2 = np.eye(2)


def test_battery_diagonal_single_site():
    # spins aligned with +z carry -omega0/2 each; |0> is the ground state
    np.testing.assert_allclose(battery_diagonal(1, 1.0), [-0.5, 0.5])


def test_battery_diagonal_two_sites():
    np.testing.assert_allclose(battery_diagonal(2, 1.0), [-1.0, 0.0, 0.0, 1.0])


def test_battery_diagonal_ground_state_is_index_zero():
    hb = battery_diagonal(5, 0.7)
    assert np.argmin(hb) == 0
    assert hb[0] == pytest.approx(-5 * 0.7 / 2)


def test_battery_matrix_matches_kron_sum():
    n = 3
    omega0 = 1.1
    expected = np.zeros((8, 8), dtype=complex)
    for site in range(n):
        expected += pauli_string(n, {site: "Z"})
    expected *= -omega0 / 2.0
    np.testing.assert_allclose(build_battery_hamiltonian(n, omega0), expected)


def test_pauli_string_site_zero_is_leftmost_factor():
    np.testing.assert_allclose(pauli_string(2, {0: "Y"}), np.kron(SY, I2))
    np.testing.assert_allclose(pauli_string(2, {1: "Y"}), np.kron(I2, SY))


def test_pauli_string_two_site_product():
    np.testing.assert_allclose(pauli_string(2, {0: "X", 1: "X"}), np.kron(SX, SX))


def test_pauli_term_matrix_and_validation():
    term = PauliTerm(coefficient=0.5, factors=((0, "X"), (1, "Z")))
    np.testing.assert_allclose(term.matrix(2), 0.5 * np.kron(SX, SZ))
    with pytest.raises(ValueError):
        PauliTerm(coefficient=float("nan"), factors=((0, "X"),)).matrix(1)


def test_single_qubit_scheme_requires_one_qubit():
    with pytest.raises(ValueError):
        BatteryModel(n_qubits=2, omega0=1.0, scheme=SingleQubit(Omega0=1.0))


@pytest.mark.parametrize("n,k", [(4, 3), (6, 4), (2, 5)])
def test_kbody_requires_divisible_block(n, k):
    with pytest.raises(ValueError):
        BatteryModel(n_qubits=n, omega0=1.0, scheme=KBody(k=k, Omega0=1.0))


def test_ising_string_length_limits():
    with pytest.raises(ValueError):
        BatteryModel(n_qubits=4, omega0=1.0, scheme=IsingS(s=1, Omega_s=1.0))
    with pytest.raises(ValueError):
        BatteryModel(n_qubits=4, omega0=1.0, scheme=IsingS(s=5, Omega_s=1.0))


def test_kbody_drive_collective_two_qubits():
    model = BatteryModel(n_qubits=2, omega0=1.0, scheme=KBody(k=2, Omega0=0.8))
    np.testing.assert_allclose(charging_drive(model), 0.8 * np.kron(SX, SX))


def test_kbody_drive_parallel_halves_coupling():
    # Omega_k = (k/N) Omega0 keeps the total drive norm at Omega0
    model = BatteryModel(n_qubits=2, omega0=1.0, scheme=KBody(k=1, Omega0=1.0))
    expected = 0.5 * (np.kron(SX, I2) + np.kron(I2, SX))
    np.testing.assert_allclose(charging_drive(model), expected)


def test_ising_drive_overlapping_strings():
    model = BatteryModel(n_qubits=3, omega0=1.0, scheme=IsingS(s=2, Omega_s=1.3))
    expected = -1.3 * (np.kron(np.kron(SX, SX), I2) + np.kron(I2, np.kron(SX, SX)))
    np.testing.assert_allclose(charging_drive(model), expected)


def test_charging_hamiltonian_subtracts_battery():
    model = BatteryModel(n_qubits=2, omega0=1.0, scheme=KBody(k=2, Omega0=1.0))
    hc = build_charging_hamiltonian(model)
    hb = np.diag(battery_diagonal(2, 1.0))
    np.testing.assert_allclose(hc + hb, charging_drive(model).astype(complex))


def test_custom_scheme_total_includes_battery():
    term = PauliTerm(coefficient=0.4, factors=((0, "X"),))
    model = BatteryModel(n_qubits=1, omega0=1.0, scheme=Custom(terms=(term,)))
    total, spec = total_with_spectrum(model)
    expected = 0.4 * SX + np.diag([-0.5, 0.5])
    np.testing.assert_allclose(spec.eigenvectors @ np.diag(spec.eigenvalues) @ spec.eigenvectors.conj().T, expected, atol=1e-12)


def test_power_observable_collective_pair():
    """P0 = -i[H_B, H_C] for the two-qubit collective block.

    The commutator evaluates to -Omega_k * omega0 * (sigma_y sigma_x +
    sigma_x sigma_y); the sign follows from sigma_z |0> = +|0> and
    H_B = -(omega0/2) sum sigma_z.
    """
    model = BatteryModel(n_qubits=2, omega0=1.0, scheme=KBody(k=2, Omega0=1.0))
    hb = build_battery_hamiltonian(2, 1.0)
    hc = build_charging_hamiltonian(model)
    p0 = power_counting_observable(hb, hc)
    expected = -(np.kron(SY, SX) + np.kron(SX, SY))
    np.testing.assert_allclose(p0, expected, atol=1e-12)


def test_power_from_diagonal_matches_generic_commutator():
    model = BatteryModel(n_qubits=3, omega0=0.9, scheme=IsingS(s=2, Omega_s=0.6))
    hb_diag = battery_diagonal(3, 0.9)
    hc = build_charging_hamiltonian(model)
    generic = power_counting_observable(np.diag(hb_diag), hc, scale=2.5)
    fast = power_from_battery_diagonal(hb_diag, hc, scale=2.5)
    np.testing.assert_allclose(fast, generic, atol=1e-12)


def test_power_diagonal_drops_diagonal_part_of_drive():
    # the gap factor kills diagonal entries, so drive and H_C give the same P0
    model = BatteryModel(n_qubits=2, omega0=1.0, scheme=KBody(k=2, Omega0=1.0))
    hb_diag = battery_diagonal(2, 1.0)
    via_drive = power_from_battery_diagonal(hb_diag, charging_drive(model))
    via_hc = power_from_battery_diagonal(hb_diag, build_charging_hamiltonian(model))
    np.testing.assert_allclose(via_drive, via_hc, atol=1e-12)


def test_normalized_total_spectrum_in_unit_interval():
    model = BatteryModel(
        n_qubits=3, omega0=2.0, scheme=IsingS(s=2, Omega_s=1.0), normalize_total=True
    )
    total, spec = total_with_spectrum(model)
    assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
    assert spec.eigenvalues[-1] == pytest.approx(1.0, abs=1e-12)
    assert total.scale == pytest.approx(total.e_max - total.e_min)


def test_dimension_cap_enforced():
    model = BatteryModel(n_qubits=6, omega0=1.0, scheme=KBody(k=2, Omega0=1.0))
    with pytest.raises(DimensionCapError):
        charging_drive(model, max_qubits=4)


def test_spectral_decompose_reconstructs_matrix():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = (a + a.conj().T) / 2
    spec = spectral_decompose(h)
    rec = spec.eigenvectors @ (spec.eigenvalues[:, None] * spec.eigenvectors.conj().T)
    np.testing.assert_allclose(rec, h, atol=1e-12)
    assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_require_hermitian_rejects_skew():
    m = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        require_hermitian(m, what="test matrix")
