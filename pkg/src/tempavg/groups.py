"""Randomization groups: sampling, circuit synthesis and enumeration.

Five families are supported: diagonal phase operators parametrized by a
length-n vector over Z4 and a strictly upper triangular bit matrix;
linear permutations |b> -> |Lb> for invertible L; the cyclic subgroup
generated by multiplication with a field generator; the Pauli-label
normalizer parametrized by a sign vector x and a symplectic label map L;
and the conditional variant acting on the first n-1 qubits when the
last qubit is |1>.

Pauli labels are length-2n bit vectors in blocked layout: the first n
bits are the X parts (one per qubit), the last n bits the Z parts, with
(0,0) = I, (1,0) = X, (0,1) = Z, (1,1) = Y.  A circuit built only from
Clifford gates conjugates the 2n generator labels as
``sigma_b -> (-1)^<x,b> (phase) sigma_(Lb)``; ``conjugation_action``
recovers (x, L) with the sign convention that each generator's phase
exponent is folded into x (generators always map to +/- a Pauli).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import circuits as qc
from . import gf2
from .field import GF2Field

_I4 = np.array([1.0, 1.0j, -1.0, -1.0j])


class ConjugationError(ValueError):
    """Conjugating a generator did not land on a signed Pauli label."""


# ---------------------------------------------------------------------------
# element types


@dataclass(frozen=True, eq=False)
class DiagonalElement:
    x: tuple[int, ...]  # entries in {0,1,2,3}
    B: np.ndarray  # strictly upper triangular 0-1 matrix

    @property
    def n(self) -> int:
        return len(self.x)

    def phase_pows(self) -> np.ndarray:
        """i-exponent f(k) = <x,k> + 2<k,Bk> mod 4, per basis index k."""
        n = self.n
        dim = 1 << n
        K = np.array([gf2.int_to_bits(k, n) for k in range(dim)], dtype=np.int64)
        quad = np.einsum("ki,ij,kj->k", K, self.B.astype(np.int64), K) % 2
        return (K @ np.array(self.x, dtype=np.int64) + 2 * quad) % 4


@dataclass(frozen=True, eq=False)
class LinearPermElement:
    L: np.ndarray

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def permutation(self) -> np.ndarray:
        n = self.n
        return np.array(
            [gf2.bits_to_int(gf2.mat_vec(self.L, gf2.int_to_bits(i, n)))
             for i in range(1 << n)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class CyclicElement:
    k: int
    field: GF2Field

    @property
    def n(self) -> int:
        return self.field.n

    def multiplier(self) -> int:
        return self.field.pow(self.field.generator(), self.k)

    def permutation(self) -> np.ndarray:
        return self.field.mult_permutation(self.multiplier())

    def matrix(self) -> np.ndarray:
        return self.field.mult_matrix(self.multiplier())


@dataclass(frozen=True, eq=False)
class NormalizerElement:
    x: np.ndarray  # length 2n sign vector
    L: np.ndarray  # 2n x 2n symplectic label map

    @property
    def n(self) -> int:
        return self.L.shape[0] // 2


@dataclass(frozen=True, eq=False)
class ConditionalNormalizerElement:
    inner: NormalizerElement
    control: int  # always the last qubit; the inner acts on qubits 0..n-2

    @property
    def n(self) -> int:
        return self.inner.n + 1


# ---------------------------------------------------------------------------
# samplers


def sample_diagonal(n: int, rng: np.random.Generator) -> DiagonalElement:
    if n < 1:
        raise ValueError("n must be >= 1")
    x = tuple(int(v) for v in rng.integers(0, 4, size=n))
    B = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(i + 1, n):
            B[i, j] = rng.integers(0, 2)
    return DiagonalElement(x, B)


def sample_linear_perm(n: int, rng: np.random.Generator) -> LinearPermElement:
    return LinearPermElement(gf2.random_invertible(n, rng))


def sample_cyclic(n: int, rng: np.random.Generator) -> CyclicElement:
    field = GF2Field(n)
    return CyclicElement(int(rng.integers(0, field.order - 1)), field)


def sample_normalizer(n: int, rng: np.random.Generator) -> NormalizerElement:
    if n < 1:
        raise ValueError("n must be >= 1")
    L = gf2.random_symplectic(n, rng)
    x = rng.integers(0, 2, size=2 * n).astype(np.uint8)
    return NormalizerElement(x, L)


def sample_conditional_normalizer(
        n: int, rng: np.random.Generator) -> ConditionalNormalizerElement:
    if n < 2:
        raise ValueError("n must be >= 2")
    return ConditionalNormalizerElement(sample_normalizer(n - 1, rng), n - 1)


# ---------------------------------------------------------------------------
# Pauli labels


_PAULI_SINGLES = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
}
_pauli_cache: dict[tuple[int, bytes], np.ndarray] = {}


def pauli_matrix(n: int, label: np.ndarray) -> np.ndarray:
    """Tensor-product Pauli for a blocked (x | z) label vector."""
    label = np.asarray(label, dtype=np.uint8)
    key = (n, label.tobytes())
    hit = _pauli_cache.get(key)
    if hit is not None:
        return hit
    out = np.eye(1, dtype=complex)
    for q in range(n):
        out = np.kron(out, _PAULI_SINGLES[(int(label[q]), int(label[n + q]))])
    _pauli_cache[key] = out
    return out


def decode_pauli(a: np.ndarray, n: int, atol: float = 1e-9):
    """Decode a = sign * sigma_label; raises ConjugationError otherwise."""
    dim = 1 << n
    col0 = a[:, 0]
    m = int(np.argmax(np.abs(col0)))
    if abs(abs(col0[m]) - 1.0) > atol:
        raise ConjugationError("column magnitude is not 1")
    label = np.zeros(2 * n, dtype=np.uint8)
    label[:n] = gf2.int_to_bits(m, n)
    for q in range(n):
        i = 1 << (n - 1 - q)
        ratio = a[i ^ m, i] / col0[m]
        if abs(ratio - 1.0) <= atol:
            label[n + q] = 0
        elif abs(ratio + 1.0) <= atol:
            label[n + q] = 1
        else:
            raise ConjugationError("entry ratio is not +/-1")
    w_y = int(np.sum(label[:n] * label[n:]))
    sign = col0[m] / _I4[w_y % 4]
    if abs(sign - 1.0) <= atol:
        s = 1
    elif abs(sign + 1.0) <= atol:
        s = -1
    else:
        raise ConjugationError("global sign is not +/-1")
    if not np.allclose(a, s * pauli_matrix(n, label), atol=atol, rtol=0.0):
        raise ConjugationError("matrix is not a signed Pauli")
    return label, s


_CLIFFORD_KINDS = {qc.NOT, qc.CNOT, qc.CZ, qc.PHASE_S, qc.ROT_Y_90, qc.SWAP,
                   qc.PERM_PHASE}


def conjugation_action(circuit: qc.Circuit) -> tuple[np.ndarray, np.ndarray]:
    """Sign vector x and label map L from explicit matrix conjugation.

    Conjugates the 2n generator Paulis by the circuit unitary and decodes
    each image; the generator sign (-1)^(x_j) fixes x (i-power phases do
    not arise for generators).  Raises ConjugationError if the circuit
    contains a non-Clifford gate kind or an image is not a signed Pauli.
    """
    for g in circuit.gates:
        if g.kind not in _CLIFFORD_KINDS:
            raise ConjugationError(f"non-Clifford gate kind {g.kind!r}")
    n = circuit.n_qubits
    u = qc.circuit_unitary(circuit)
    udag = u.conj().T
    L = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    x = np.zeros(2 * n, dtype=np.uint8)
    for j in range(2 * n):
        label = np.zeros(2 * n, dtype=np.uint8)
        label[j] = 1
        image = u @ pauli_matrix(n, label) @ udag
        out_label, sign = decode_pauli(image, n)
        L[:, j] = out_label
        x[j] = 0 if sign > 0 else 1
    if not gf2.is_symplectic(L):
        raise ConjugationError("label map is not symplectic")
    return x, L


# ---------------------------------------------------------------------------
# circuit synthesis


def _tableau_row_ops(L: np.ndarray) -> list[tuple[str, int, int]]:
    """Row operations reducing a symplectic tableau to the identity.

    Works qubit by qubit: the image column of X_q is swept to the unit
    vector using at most O(n) controlled-nots, x/z row swaps and phase
    rows, then the image column of Z_q is swept with operations that
    leave the finished column alone.  Returned ops compose left to
    right; each is an involution on labels.
    """
    d = L.shape[0]
    n = d // 2
    W = L.astype(np.uint8).copy()
    ops: list[tuple[str, int, int]] = []

    def do(kind: str, a: int, b: int = -1) -> None:
        if kind == "cnot":
            W[b, :] ^= W[a, :]
            W[n + a, :] ^= W[n + b, :]
        elif kind == "ry":
            W[[a, n + a], :] = W[[n + a, a], :]
        elif kind == "s":
            W[n + a, :] ^= W[a, :]
        elif kind == "sx":
            W[a, :] ^= W[n + a, :]
        ops.append((kind, a, b))

    for q in range(n):
        cq, cz = q, n + q
        # sweep the X_q image column to e_q
        if not W[q:n, cq].any():
            t = q + int(np.nonzero(W[n + q:d, cq])[0][0])
            do("ry", t)
        if not W[q, cq]:
            t = q + 1 + int(np.nonzero(W[q + 1:n, cq])[0][0])
            do("cnot", t, q)
        for t in range(q + 1, n):
            if W[t, cq]:
                do("cnot", q, t)
        for t in range(q + 1, n):
            if W[n + t, cq]:
                do("ry", t)
                do("cnot", q, t)
        if W[n + q, cq]:
            do("s", q)
        # sweep the Z_q image column to e_(n+q) without touching column cq
        for t in range(q + 1, n):
            if W[n + t, cz]:
                do("cnot", t, q)
        for t in range(q + 1, n):
            if W[t, cz]:
                do("ry", t)
                do("cnot", t, q)
        if W[q, cz]:
            do("sx", q)
    assert np.array_equal(W, np.eye(d, dtype=np.uint8)), "sweep failed"
    return ops


def _ops_to_gates(ops: list[tuple[str, int, int]]) -> list[qc.Gate]:
    gates: list[qc.Gate] = []
    for kind, a, b in reversed(ops):
        if kind == "cnot":
            gates.append(qc.cnot(a, b))
        elif kind == "ry":
            gates.append(qc.rot_y90(a))
        elif kind == "s":
            gates.append(qc.phase_s(a))
        elif kind == "sx":
            gates.extend([qc.rot_y90(a), qc.phase_s(a), qc.rot_y90(a)])
    return gates


_tableau_cache: dict[bytes, tuple[qc.Circuit, np.ndarray, np.ndarray]] = {}


def _tableau_circuit(L: np.ndarray) -> tuple[qc.Circuit, np.ndarray, np.ndarray]:
    """(circuit, unitary, natural sign vector) realizing the label map L."""
    key = L.tobytes()
    hit = _tableau_cache.get(key)
    if hit is not None:
        return hit
    n = L.shape[0] // 2
    if not gf2.is_symplectic(L):
        raise ValueError("label map is not symplectic")
    circuit = qc.Circuit(n, tuple(_ops_to_gates(_tableau_row_ops(L))))
    x_nat, L_check = conjugation_action(circuit)
    assert np.array_equal(L_check, L), "tableau synthesis mismatch"
    entry = (circuit, qc.circuit_unitary(circuit), x_nat)
    _tableau_cache[key] = entry
    return entry


def _pauli_correction(n: int, x_want: np.ndarray, x_have: np.ndarray) -> np.ndarray:
    m = gf2.symplectic_form(n)
    return gf2.mat_vec(m, (x_want.astype(np.uint8) ^ x_have.astype(np.uint8)))


def _pauli_gates(n: int, label: np.ndarray) -> list[qc.Gate]:
    gates: list[qc.Gate] = []
    for q in range(n):
        if label[q]:
            gates.append(qc.not_(q))
        if label[n + q]:
            gates.append(qc.phase_s(q, power=2))
    return gates


def element_to_circuit(element) -> qc.Circuit:
    """Quantum network implementing a group element.

    Diagonal, linear-permutation and cyclic elements come out exact
    (phase-exact or permutation-exact); normalizer elements are exact up
    to a global phase, realized as a Pauli sign correction followed by
    the label-map network.
    """
    if isinstance(element, DiagonalElement):
        n = element.n
        gates = [qc.phase_s(q, power=element.x[q]) for q in range(n)
                 if element.x[q] % 4]
        gates += [qc.cz(i, j) for i in range(n) for j in range(i + 1, n)
                  if element.B[i, j]]
        return qc.Circuit(n, tuple(gates))
    if isinstance(element, LinearPermElement):
        ops = gf2.gaussian_decompose(element.L)
        return qc.Circuit(element.n, tuple(qc.cnot(s, t) for s, t in ops))
    if isinstance(element, CyclicElement):
        ops = gf2.gaussian_decompose(element.matrix())
        return qc.Circuit(element.n, tuple(qc.cnot(s, t) for s, t in ops))
    if isinstance(element, NormalizerElement):
        n = element.n
        circuit, _, x_nat = _tableau_circuit(element.L)
        correction = _pauli_correction(n, element.x, x_nat)
        return qc.Circuit(n, tuple(_pauli_gates(n, correction)) + circuit.gates)
    if isinstance(element, ConditionalNormalizerElement):
        n = element.n
        inner_circuit = element_to_circuit(element.inner)
        gate = qc.conditioned(element.control, 1, inner_circuit,
                              tuple(range(n - 1)))
        return qc.Circuit(n, (gate,))
    raise TypeError(f"unknown element type {type(element).__name__}")


def element_unitary(element) -> np.ndarray:
    """Dense unitary of a group element (global phase convention free)."""
    if isinstance(element, DiagonalElement):
        return np.diag(_I4[element.phase_pows()])
    if isinstance(element, (LinearPermElement, CyclicElement)):
        perm = element.permutation()
        dim = perm.shape[0]
        u = np.zeros((dim, dim), dtype=complex)
        u[perm, np.arange(dim)] = 1.0
        return u
    if isinstance(element, NormalizerElement):
        n = element.n
        _, u_tab, x_nat = _tableau_circuit(element.L)
        correction = _pauli_correction(n, element.x, x_nat)
        # phase convention pinned to the synthesized gate product (the
        # emitted NOT-then-phase pair realizes i times Y), so the matrix
        # equals the circuit unitary exactly
        w_y = int(np.sum(correction[:n] * correction[n:]))
        return u_tab @ (pauli_matrix(n, correction) * (1j ** (w_y % 4)))
    if isinstance(element, ConditionalNormalizerElement):
        inner_u = element_unitary(element.inner)
        dim = 1 << element.n
        u = np.eye(dim, dtype=complex)
        u[1::2, 1::2] = inner_u
        return u
    raise TypeError(f"unknown element type {type(element).__name__}")


# ---------------------------------------------------------------------------
# exhaustive enumeration

_GROUP_CAPS = {"diagonal": 3, "linear": 3, "cyclic": 4, "normalizer": 2,
               "conditional_normalizer": 3}


def group_elements(kind: str, n: int):
    """Iterate every element of a group at small n (exhaustive oracles)."""
    if kind not in _GROUP_CAPS:
        raise ValueError(f"unknown group kind {kind!r}")
    if n > _GROUP_CAPS[kind]:
        raise ValueError(f"group {kind!r} enumeration capped at n <= "
                         f"{_GROUP_CAPS[kind]}")
    if kind == "diagonal":
        upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for xs in product(range(4), repeat=n):
            for bits in product((0, 1), repeat=len(upper)):
                B = np.zeros((n, n), dtype=np.uint8)
                for (i, j), b in zip(upper, bits):
                    B[i, j] = b
                yield DiagonalElement(xs, B)
    elif kind == "linear":
        for L in gf2.enumerate_invertible(n):
            yield LinearPermElement(L)
    elif kind == "cyclic":
        field = GF2Field(n)
        for k in range(field.order - 1):
            yield CyclicElement(k, field)
    elif kind == "normalizer":
        for L in gf2.enumerate_symplectic(n):
            for xs in product((0, 1), repeat=2 * n):
                yield NormalizerElement(np.array(xs, dtype=np.uint8), L)
    else:
        for inner in group_elements("normalizer", n - 1):
            yield ConditionalNormalizerElement(inner, n - 1)


def group_order(kind: str, n: int) -> int:
    if kind == "diagonal":
        return 4**n * 2 ** (n * (n - 1) // 2)
    if kind == "linear":
        count = 1
        for k in range(n):
            count *= (1 << n) - (1 << k)
        return count
    if kind == "cyclic":
        return (1 << n) - 1
    if kind == "normalizer":
        return (1 << (2 * n)) * gf2.symplectic_count(n)
    if kind == "conditional_normalizer":
        return group_order("normalizer", n - 1)
    raise ValueError(f"unknown group kind {kind!r}")


def enumerate_expectation(kind: str, rho: np.ndarray, n: int | None = None
                          ) -> np.ndarray:
    """Exact group average (1/|G|) sum_P P rho P^dagger."""
    if n is None:
        n = int(rho.shape[0]).bit_length() - 1
    total = np.zeros_like(rho, dtype=complex)
    count = 0
    for element in group_elements(kind, n):
        u = element_unitary(element)
        total += u @ rho @ u.conj().T
        count += 1
    return total / count


def pi2_average(kind: str, n: int, tensor: np.ndarray) -> np.ndarray:
    """Exact group average of the doubled action on a four-index tensor.

    ``tensor`` has shape (N, N, N, N) and transforms as
    T -> (U T U^dagger) x (U T U^dagger) on the two index pairs.
    """
    total = np.zeros_like(tensor, dtype=complex)
    count = 0
    for element in group_elements(kind, n):
        u = element_unitary(element)
        uc = u.conj()
        total += np.einsum("ia,jb,kc,ld,abcd->ijkl", u, uc, u, uc, tensor,
                           optimize=True)
        count += 1
    return total / count


# ---------------------------------------------------------------------------
# JSON records (replayable experiment manifests)


def element_to_json_dict(element) -> dict:
    if isinstance(element, DiagonalElement):
        return {"kind": "diagonal", "x": list(element.x),
                "B": element.B.astype(int).tolist()}
    if isinstance(element, LinearPermElement):
        return {"kind": "linear", "L": element.L.astype(int).tolist()}
    if isinstance(element, CyclicElement):
        return {"kind": "cyclic", "k": element.k, "n": element.field.n,
                "modulus": element.field.modulus}
    if isinstance(element, NormalizerElement):
        return {"kind": "normalizer", "x": element.x.astype(int).tolist(),
                "L": element.L.astype(int).tolist()}
    if isinstance(element, ConditionalNormalizerElement):
        return {"kind": "conditional_normalizer", "control": element.control,
                "inner": element_to_json_dict(element.inner)}
    raise TypeError(f"unknown element type {type(element).__name__}")


def element_from_json_dict(record: dict):
    kind = record["kind"]
    if kind == "diagonal":
        return DiagonalElement(tuple(record["x"]),
                               np.array(record["B"], dtype=np.uint8))
    if kind == "linear":
        return LinearPermElement(np.array(record["L"], dtype=np.uint8))
    if kind == "cyclic":
        field = GF2Field(record["n"])
        if field.modulus != record["modulus"]:
            raise ValueError("modulus mismatch against the shipped table")
        return CyclicElement(record["k"], field)
    if kind == "normalizer":
        return NormalizerElement(np.array(record["x"], dtype=np.uint8),
                                 np.array(record["L"], dtype=np.uint8))
    if kind == "conditional_normalizer":
        return ConditionalNormalizerElement(
            element_from_json_dict(record["inner"]), record["control"])
    raise ValueError(f"unknown element kind {kind!r}")


# ---------------------------------------------------------------------------
# the phase independence condition


def verify_phase_independence(n: int) -> bool:
    """Check the fourth-root phase independence condition exhaustively.

    For every quadruple (j, k, l, m) of basis indices, if
    f(j)-f(k)+f(l)-f(m) = 0 mod 4 for every diagonal element's phase
    exponent f, then j=k and l=m, or j=m and k=l.  Equivalently: the
    difference signature of an ordered pair (j, k) over all group
    elements is zero only for j=k, and nonzero signatures never repeat.
    """
    if n > 3:
        raise ValueError("exhaustive phase-independence check capped at n <= 3")
    dim = 1 << n
    table = np.stack([e.phase_pows() for e in group_elements("diagonal", n)])
    seen: dict[bytes, tuple[int, int]] = {}
    for j in range(dim):
        for k in range(dim):
            sig = ((table[:, j] - table[:, k]) % 4).astype(np.int8).tobytes()
            if not any(sig):
                if j != k:
                    return False
                continue
            if sig in seen:
                return False
            seen[sig] = (j, k)
    return True
