import io

import numpy as np
import pytest

from tempavg import circuits as qc
from tempavg import qcore

# permutation fixing |00>, cycling |01> -> |11> -> |10> -> |01> (the worked
# two-spin example's first non-trivial preparation) and its phase variants
P1 = qc.perm_phase([0, 3, 1, 2], [0, 0, 0, 0])
P1_TILDE = qc.perm_phase([0, 3, 1, 2], [1, 1, 2, 0])
P2 = qc.perm_phase([0, 2, 3, 1], [0, 0, 0, 0])
P2_TILDE = qc.perm_phase([0, 2, 3, 1], [1, 2, 1, 0])


def two_spin_example_state():
    dev = 1e-5 * np.array([1.0, 0.6, -0.6, -1.0])
    return np.diag((0.25 + dev).astype(complex))


def test_thermal_first_order_two_spin():
    spec = qcore.ThermalSpec((0.8e-5, 0.2e-5))
    rho = qcore.thermal_state(spec)
    want = 0.25 * (1 + 1e-5 * np.array([1.0, 0.6, -0.6, -1.0]))
    assert np.allclose(np.diag(rho).real, want, atol=1e-20)
    assert abs(np.trace(rho) - 1.0) == 0.0


def test_thermal_zero_polarization_and_exact_mode():
    rho = qcore.thermal_state(qcore.ThermalSpec((0.0, 0.0, 0.0)))
    assert np.allclose(rho, np.eye(8) / 8)
    rho1 = qcore.thermal_state(qcore.ThermalSpec((0.5,), mode="exact-product"))
    assert np.allclose(np.diag(rho1).real, [0.75, 0.25])


def test_thermal_trace_exact_and_validation():
    rng = np.random.default_rng(0)
    deltas = tuple(rng.uniform(-0.01, 0.01, size=4))
    for mode in ("first-order", "exact-product"):
        rho = qcore.thermal_state(qcore.ThermalSpec(deltas, mode))
        assert abs(np.trace(rho).real - 1.0) < 1e-15
    with pytest.raises(ValueError):
        qcore.ThermalSpec((1.0,))
    with pytest.raises(ValueError):
        qcore.ThermalSpec((0.1,), mode="bogus")


def test_thermal_first_order_warns_when_linearization_is_dubious():
    with pytest.warns(UserWarning, match="first-order"):
        qcore.thermal_state(qcore.ThermalSpec((0.2, 0.2)))


def test_apply_identity_circuit():
    rho = two_spin_example_state()
    out = qc.apply_circuit(rho, qc.Circuit(2))
    assert np.array_equal(out, rho)


def test_apply_worked_example_permutation():
    rho = two_spin_example_state()
    out = qc.apply_circuit(rho, qc.Circuit(2, (P1,)))
    want_dev = 1e-5 * np.array([1.0, -0.6, -1.0, 0.6])
    assert np.allclose(np.diag(out).real - 0.25, want_dev, atol=1e-20)


def test_phase_variants_equal_on_diagonal_states():
    rng = np.random.default_rng(1)
    w = rng.random(4)
    rho = qcore.diagonal_density(w / w.sum())
    for plain, tilde in ((P1, P1_TILDE), (P2, P2_TILDE)):
        a = qc.apply_circuit(rho, qc.Circuit(2, (plain,)))
        b = qc.apply_circuit(rho, qc.Circuit(2, (tilde,)))
        assert np.allclose(a, b, atol=1e-15)


def all_kinds_circuit() -> qc.Circuit:
    inner = qc.Circuit(2, (qc.not_(0), qc.cnot(0, 1)))
    return qc.Circuit(3, (
        qc.not_(0), qc.cnot(0, 1), qc.cz(1, 2), qc.phase_s(2, power=3),
        qc.rot_y90(1), qc.swap(0, 2),
        qc.gen_toffoli(((0, 1), (1, 0)), 2),
        qc.conditioned(2, 1, inner, (0, 1)),
        qc.perm_phase(np.roll(np.arange(8), 3), [1, 0, 2, 3, 0, 1, 2, 0]),
    ))


def test_apply_circuit_preserves_trace_and_hermiticity_for_all_kinds():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    out = qc.apply_circuit(rho, all_kinds_circuit())
    assert abs(np.trace(out) - 1.0) < 1e-12
    assert np.abs(out - out.conj().T).max() < 1e-12
    u = qc.circuit_unitary(all_kinds_circuit())
    assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-12


def test_measure_examples():
    assert qcore.measure_sigma_z1(qcore.basis_density(3, 0)) == 1.0
    assert qcore.measure_sigma_z1(qcore.maximally_mixed(3)) == 0.0
    # averaged two-spin state: I/4 shifted with excess 4/3e-5 in |00>
    avg = 0.25 * np.eye(4, dtype=complex)
    avg += 1e-5 * np.diag([4.0 / 3.0, 0, 0, 0]) - (1e-5 / 3.0) * np.eye(4)
    got = qcore.measure_sigma_z1(avg)
    assert abs(got - 1.3333333333333333e-5) < 1e-16


def test_measurement_noise_statistics():
    rng = np.random.default_rng(3)
    rho = qcore.basis_density(2, 0)
    s = 0.5
    model = qcore.MeasurementModel(s)
    draws = np.array([qcore.measure_sigma_z1(rho, model, rng)
                      for _ in range(100000)])
    assert abs(draws.mean() - 1.0) < 4 * s / np.sqrt(100000)
    with pytest.raises(ValueError):
        qcore.measure_sigma_z1(rho, model, None)


def test_deviation_parts_arithmetic_example():
    rho = qcore.diagonal_density([0.4, 0.3, 0.2, 0.1])
    parts = qcore.deviation_parts(rho)
    assert abs(parts.p_bar - 0.2) < 1e-15
    assert np.allclose(np.diag(parts.check).real, [0, 0.1, 0, -0.1], atol=1e-15)
    assert abs(np.trace(parts.check)) < 1e-15
    assert abs(np.trace(parts.check_d)) < 1e-15


def test_deviation_parts_decomposition_identity():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    parts = qcore.deviation_parts(rho)
    assert np.abs(parts.check - (parts.check_0 + parts.check_not0)).max() == 0.0
    assert abs(np.trace(parts.check)) < 1e-14
    assert parts.check[0, 0] == 0.0


def test_deviation_of_effective_pure_state_is_zero():
    rho = qcore.effective_pure_target(qcore.diagonal_density([0.5, 0.3, 0.1, 0.1]))
    parts = qcore.deviation_parts(rho)
    assert np.abs(parts.check).max() < 1e-15


def test_effective_pure_target_examples():
    rho = qcore.diagonal_density([0.4, 0.3, 0.2, 0.1])
    target = qcore.effective_pure_target(rho)
    assert np.allclose(np.diag(target).real, [0.4, 0.2, 0.2, 0.2], atol=1e-15)
    mixed = qcore.maximally_mixed(3)
    assert np.allclose(qcore.effective_pure_target(mixed), mixed, atol=1e-16)
    avg = qcore.effective_pure_target(two_spin_example_state())
    assert abs((avg[0, 0] - avg[1, 1]).real - (4.0 / 3.0) * 1e-5) < 1e-16


def test_partial_trace_product_and_bell():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho_a = a @ a.conj().T
    rho_a /= np.trace(rho_a).real
    rho_b = qcore.diagonal_density([0.7, 0.3])
    joint = qcore.tensor(rho_a, rho_b)
    assert np.abs(qcore.partial_trace_last(joint, 1) - rho_a).max() < 1e-14
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    bell = np.outer(psi, psi.conj())
    assert np.abs(qcore.partial_trace_last(bell, 1) - np.eye(2) / 2).max() < 1e-14
    with pytest.raises(ValueError):
        qcore.partial_trace_last(bell, 2)


def test_sigma_z1_and_conjugated_observable():
    sz = qcore.sigma_z1_matrix(2)
    assert np.allclose(np.diag(sz).real, [1, 1, -1, -1])
    rng = np.random.default_rng(6)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, _ = np.linalg.qr(a)
    obs = qcore.conjugated_observable(q)
    assert np.abs(obs.matrix @ obs.matrix - np.eye(4)).max() < 1e-10
    assert np.abs(obs.matrix - obs.matrix.conj().T).max() < 1e-10


def test_density_text_round_trip():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    buf = io.StringIO()
    qcore.save_density_text(rho, buf)
    buf.seek(0)
    back = qcore.load_density_text(buf)
    assert np.abs(back - rho).max() < 1e-15


def test_check_density():
    qcore.check_density(qcore.maximally_mixed(2), check_psd=True)
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.5
    with pytest.raises(ValueError, match="Hermitian"):
        qcore.check_density(bad)
    with pytest.raises(ValueError, match="trace"):
        qcore.check_density(np.eye(4, dtype=complex))
