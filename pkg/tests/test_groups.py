import numpy as np
import pytest

from tempavg import circuits as qc
from tempavg import gf2, groups, qcore
from tempavg.field import GF2Field


def test_sample_diagonal_ranges_and_phase():
    rng = np.random.default_rng(0)
    for _ in range(50):
        e = groups.sample_diagonal(2, rng)
        assert all(0 <= v < 4 for v in e.x)
        assert e.B[1, 0] == 0 and e.B[0, 0] == 0 and e.B[1, 1] == 0
    e = groups.DiagonalElement((0, 2), np.zeros((2, 2), dtype=np.uint8))
    phases = groups.element_unitary(e).diagonal()
    assert phases[0b01] == -1.0  # i^2 on |01>


def test_diagonal_group_sizes():
    actions_n1 = {groups.element_unitary(e).diagonal().tobytes()
                  for e in groups.group_elements("diagonal", 1)}
    assert len(actions_n1) == 4
    actions_n2 = {groups.element_unitary(e).diagonal().tobytes()
                  for e in groups.group_elements("diagonal", 2)}
    assert len(actions_n2) == 32 == groups.group_order("diagonal", 2)


def test_diagonal_circuit_matches_action_and_gate_count():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3):
        for _ in range(20):
            e = groups.sample_diagonal(n, rng)
            circuit = groups.element_to_circuit(e)
            assert len(circuit.gates) <= n * (n - 1) // 2 + n
            u = qc.circuit_unitary(circuit)
            assert np.abs(u - groups.element_unitary(e)).max() < 1e-12


def test_linear_identity_circuit_is_empty():
    e = groups.LinearPermElement(np.eye(3, dtype=np.uint8))
    assert groups.element_to_circuit(e).gates == ()


def test_cyclic_element_circuit_two_gates():
    fld = GF2Field(2)
    e = groups.CyclicElement(1, fld)
    circuit = groups.element_to_circuit(e)
    assert len(circuit.gates) == 2
    u = qc.circuit_unitary(circuit)
    assert np.abs(u - groups.element_unitary(e)).max() < 1e-12
    # the three-state cycle fixing |00>
    perm = e.permutation()
    assert list(perm) == [0, 2, 3, 1]


@pytest.mark.parametrize("n", [2, 3])
def test_linear_cyclic_circuits_are_permutation_exact(n):
    rng = np.random.default_rng(2)
    fld = GF2Field(n)
    for _ in range(15):
        e = groups.sample_linear_perm(n, rng)
        u = qc.circuit_unitary(groups.element_to_circuit(e))
        assert np.abs(u - groups.element_unitary(e)).max() < 1e-12
    for k in range(fld.order - 1):
        e = groups.CyclicElement(k, fld)
        u = qc.circuit_unitary(groups.element_to_circuit(e))
        assert np.abs(u - groups.element_unitary(e)).max() < 1e-12


def test_cyclic_group_composition_and_distinctness():
    for n in (2, 3):
        fld = GF2Field(n)
        order = fld.order - 1
        perms = [groups.CyclicElement(k, fld).permutation() for k in range(order)]
        assert len({p.tobytes() for p in perms}) == order
        for k1 in range(order):
            for k2 in range(order):
                composed = perms[k1][perms[k2]]
                assert np.array_equal(composed, perms[(k1 + k2) % order])


def test_conjugation_action_of_empty_circuit():
    x, L = groups.conjugation_action(qc.Circuit(2))
    assert not x.any()
    assert np.array_equal(L, np.eye(4, dtype=np.uint8))


def test_conjugation_action_cnot_tableau():
    x, L = groups.conjugation_action(qc.Circuit(2, (qc.cnot(0, 1),)))
    assert not x.any()
    # blocked labels (x0 x1 | z0 z1): X0 -> X0 X1, X1 -> X1, Z0 -> Z0,
    # Z1 -> Z0 Z1
    want = np.array([
        [1, 0, 0, 0],
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 0, 1],
    ], dtype=np.uint8)
    assert np.array_equal(L, want)


def test_conjugation_action_phase_gate_maps_x_to_y():
    x, L = groups.conjugation_action(qc.Circuit(1, (qc.phase_s(0),)))
    assert np.array_equal(L[:, 0], [1, 1])  # X label -> Y label
    assert np.array_equal(L[:, 1], [0, 1])  # Z fixed


def test_conjugation_action_rejects_non_clifford_kinds():
    toffoli = qc.Circuit(3, (qc.gen_toffoli(((0, 1), (1, 1)), 2),))
    with pytest.raises(groups.ConjugationError, match="non-Clifford"):
        groups.conjugation_action(toffoli)


def test_normalizer_enumeration_n1_has_24_actions():
    seen = set()
    for e in groups.group_elements("normalizer", 1):
        seen.add((e.x.tobytes(), e.L.tobytes()))
    assert len(seen) == 24 == groups.group_order("normalizer", 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normalizer_synthesis_round_trip(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(25):
        e = groups.sample_normalizer(n, rng)
        x, L = groups.conjugation_action(groups.element_to_circuit(e))
        assert np.array_equal(x, e.x)
        assert np.array_equal(L, e.L)


def test_normalizer_unitary_consistent_with_circuit():
    rng = np.random.default_rng(20)
    for n in (1, 2):
        for _ in range(10):
            e = groups.sample_normalizer(n, rng)
            u_circ = qc.circuit_unitary(groups.element_to_circuit(e))
            u_elem = groups.element_unitary(e)
            # equal up to a global phase
            overlap = np.trace(u_circ.conj().T @ u_elem) / (1 << n)
            assert abs(abs(overlap) - 1.0) < 1e-10
            assert np.abs(u_circ * overlap - u_elem).max() < 1e-10


def test_normalizer_average_kills_nonidentity_paulis():
    rng = np.random.default_rng(21)
    n, trials = 2, 10000
    label = np.array([1, 0, 0, 0], dtype=np.uint8)  # X on qubit 0
    sigma = groups.pauli_matrix(n, label)
    total = np.zeros((4, 4), dtype=complex)
    for _ in range(trials):
        u = groups.element_unitary(groups.sample_normalizer(n, rng))
        total += u @ sigma @ u.conj().T
    assert np.abs(total / trials).max() <= 5.0 / np.sqrt(trials)


def test_normalizer_pi2_average_matches_flat_pauli_mixture():
    # doubled action on sigma x sigma spreads over all nonzero labels
    rng = np.random.default_rng(22)
    n, trials = 1, 20000
    sigma = groups.pauli_matrix(n, np.array([0, 1], dtype=np.uint8))
    total = np.zeros((2, 2, 2, 2), dtype=complex)
    for _ in range(trials):
        u = groups.element_unitary(groups.sample_normalizer(n, rng))
        m = u @ sigma @ u.conj().T
        total += np.einsum("ij,kl->ijkl", m, m)
    want = np.zeros((2, 2, 2, 2), dtype=complex)
    for j in range(1, 4):
        label = np.array([j >> 1, j & 1], dtype=np.uint8)
        p = groups.pauli_matrix(n, label)
        want += np.einsum("ij,kl->ijkl", p, p) / 3.0
    assert np.abs(total / trials - want).max() <= 5.0 / np.sqrt(trials)


def test_conditional_normalizer_identity_inner():
    inner = groups.NormalizerElement(np.zeros(2, dtype=np.uint8),
                                     np.eye(2, dtype=np.uint8))
    e = groups.ConditionalNormalizerElement(inner, 1)
    assert np.abs(groups.element_unitary(e) - np.eye(4)).max() < 1e-12


def test_conditional_normalizer_block_structure():
    rng = np.random.default_rng(23)
    for _ in range(10):
        e = groups.sample_conditional_normalizer(3, rng)
        u = groups.element_unitary(e)
        inner = groups.element_unitary(e.inner)
        assert np.abs(u[0::2, 0::2] - np.eye(4)).max() < 1e-12
        assert np.abs(u[0::2, 1::2]).max() < 1e-12
        assert np.abs(u[1::2, 1::2] - inner).max() < 1e-12
        circ_u = qc.circuit_unitary(groups.element_to_circuit(e))
        overlap = np.trace(circ_u.conj().T @ u) / 8
        assert np.abs(circ_u * overlap - u).max() < 1e-10


def test_conditional_normalizer_requires_two_qubits():
    rng = np.random.default_rng(24)
    with pytest.raises(ValueError):
        groups.sample_conditional_normalizer(1, rng)


def test_conditional_sector_identity_enumerated_n2():
    from tempavg.analytics import four_tensor_basis

    basis = four_tensor_basis(2)
    avg = groups.pi2_average("conditional_normalizer", 2,
                             basis["D1"].astype(complex))
    want = (2.0 / 6.0) * (basis["J11"] + basis["E11"])
    assert np.abs(avg - want).max() < 1e-12


def test_conditional_sector_identity_monte_carlo_n3():
    from tempavg.analytics import four_tensor_basis

    rng = np.random.default_rng(25)
    n, trials = 3, 4000
    basis = four_tensor_basis(n)
    total = np.zeros((8, 8, 8, 8), dtype=complex)
    odd = np.arange(1, 8, 2)
    for _ in range(trials):
        u = groups.element_unitary(groups.sample_conditional_normalizer(n, rng))
        uc = u.conj()
        for i in odd:
            col = u[:, i]
            ccol = uc[:, i]
            m = np.outer(col, ccol)
            total += np.einsum("ij,kl->ijkl", m, m)
    avg = total / trials
    want = (2.0 / 10.0) * (basis["J11"] + basis["E11"])
    assert np.abs(avg - want).max() <= 5.0 / np.sqrt(trials)


@pytest.mark.parametrize("n,expected", [(1, True), (2, True)])
def test_phase_independence(n, expected):
    assert groups.verify_phase_independence(n) is expected


def test_phase_independence_trivial_quadruples_and_cap():
    # paired-index quadruples always satisfy the condition
    table = np.stack([e.phase_pows()
                      for e in groups.group_elements("diagonal", 2)])
    for j in range(4):
        for l in range(4):
            assert np.all((table[:, j] - table[:, j]
                           + table[:, l] - table[:, l]) % 4 == 0)
    with pytest.raises(ValueError):
        groups.verify_phase_independence(4)


def test_enumerate_expectation_diagonal_projects_to_diagonal():
    rng = np.random.default_rng(26)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    avg = groups.enumerate_expectation("diagonal", rho)
    assert np.abs(avg - np.diag(np.diag(rho))).max() < 1e-14


def test_enumerate_expectation_diag_then_linear_hits_target():
    rng = np.random.default_rng(27)
    w = rng.random(4)
    rho = qcore.diagonal_density(w / w.sum())
    avg = groups.enumerate_expectation(
        "linear", groups.enumerate_expectation("diagonal", rho))
    assert np.abs(avg - qcore.effective_pure_target(rho)).max() < 1e-14


def test_enumerate_expectation_fixes_uniform_mixture():
    mixed = qcore.maximally_mixed(2)
    for kind in ("diagonal", "linear", "cyclic", "normalizer"):
        avg = groups.enumerate_expectation(kind, mixed)
        assert np.abs(avg - mixed).max() < 1e-13


@pytest.mark.parametrize("n", [2, 3])
def test_linear_group_is_two_transitive(n):
    N = 1 << n
    covered = set()
    for e in groups.group_elements("linear", n):
        perm = e.permutation()
        for i in range(1, N):
            for j in range(1, N):
                if i != j:
                    covered.add((i, j, int(perm[i]), int(perm[j])))
    want = {(i, j, k, l)
            for i in range(1, N) for j in range(1, N)
            for k in range(1, N) for l in range(1, N)
            if i != j and k != l}
    assert covered == want


def test_element_json_round_trip():
    rng = np.random.default_rng(28)
    elements = [
        groups.sample_diagonal(3, rng),
        groups.sample_linear_perm(3, rng),
        groups.sample_cyclic(3, rng),
        groups.sample_normalizer(2, rng),
        groups.sample_conditional_normalizer(3, rng),
    ]
    for element in elements:
        record = groups.element_to_json_dict(element)
        back = groups.element_from_json_dict(record)
        assert np.abs(groups.element_unitary(back)
                      - groups.element_unitary(element)).max() < 1e-12
