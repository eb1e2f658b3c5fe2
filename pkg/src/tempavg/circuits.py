"""Gates and circuits on computational-basis indices.

Qubit 0 is the most significant bit of the basis-state index: the
n-qubit state |b0 b1 ... b_{n-1}> has index sum_j b_j 2^(n-1-j).
Gates in a circuit apply left to right.  A circuit on k qubits whose
gates address qubits 0..k-1 can be reused on a larger register by
rebuilding it with a larger ``n_qubits`` (indices keep their meaning).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

NOT = "NOT"
CNOT = "CNOT"
CZ = "CZ"
PHASE_S = "PHASE_S"
ROT_Y_90 = "ROT_Y_90"
SWAP = "SWAP"
GEN_TOFFOLI = "GEN_TOFFOLI"
CONDITIONED = "CONDITIONED"
PERM_PHASE = "PERM_PHASE"

_I4 = np.array([1.0, 1.0j, -1.0, -1.0j])


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()  # (qubit, polarity) pairs
    power: int = 1  # PHASE_S: diag(1, i**power)
    perm: tuple[int, ...] = ()  # PERM_PHASE: source index -> target index
    phase_pows: tuple[int, ...] = ()  # PERM_PHASE: i**pow per source index
    inner: "Circuit | None" = None  # CONDITIONED
    polarity: int = 1  # CONDITIONED
    targets: tuple[int, ...] = ()  # CONDITIONED: global qubits the inner acts on


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            _check_gate(g, self.n_qubits)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def then(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return Circuit(self.n_qubits, self.gates + other.gates)


def not_(q: int) -> Gate:
    return Gate(NOT, (q,))


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def cz(a: int, b: int) -> Gate:
    return Gate(CZ, (a, b))


def phase_s(q: int, power: int = 1) -> Gate:
    return Gate(PHASE_S, (q,), power=power % 4)


def rot_y90(q: int) -> Gate:
    return Gate(ROT_Y_90, (q,))


def swap(a: int, b: int) -> Gate:
    return Gate(SWAP, (a, b))


def gen_toffoli(controls: tuple[tuple[int, int], ...], target: int) -> Gate:
    return Gate(GEN_TOFFOLI, (target,), controls=tuple(controls))


def conditioned(control: int, polarity: int, inner: Circuit,
                targets: tuple[int, ...]) -> Gate:
    return Gate(CONDITIONED, (control,), inner=inner, polarity=polarity,
                targets=tuple(targets))


def perm_phase(perm, phase_pows) -> Gate:
    return Gate(PERM_PHASE, perm=tuple(int(p) for p in perm),
                phase_pows=tuple(int(p) % 4 for p in phase_pows))


def _check_gate(g: Gate, n: int) -> None:
    used = list(g.qubits) + [q for q, _ in g.controls] + list(g.targets)
    if len(set(used)) != len(used):
        raise ValueError(f"gate {g.kind} addresses a qubit twice")
    for q in used:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for n={n}")
    if g.kind == PERM_PHASE:
        if sorted(g.perm) != list(range(1 << n)):
            raise ValueError("PERM_PHASE permutation is not a bijection")
        if len(g.phase_pows) != 1 << n:
            raise ValueError("PERM_PHASE needs one phase power per index")
    if g.kind == CONDITIONED:
        if g.inner is None or g.inner.n_qubits != len(g.targets):
            raise ValueError("CONDITIONED inner circuit does not match targets")
        if g.polarity not in (0, 1):
            raise ValueError("polarity must be 0 or 1")


def _bit(i: int, q: int, n: int) -> int:
    return (i >> (n - 1 - q)) & 1


def _flip(i: int, q: int, n: int) -> int:
    return i ^ (1 << (n - 1 - q))


def gate_unitary(g: Gate, n: int) -> np.ndarray:
    """Dense 2^n x 2^n unitary of a single gate."""
    N = 1 << n
    if g.kind == ROT_Y_90:
        q = g.qubits[0]
        u = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2.0)
        out = np.kron(np.kron(np.eye(1 << q), u), np.eye(1 << (n - q - 1)))
        return out.astype(complex)
    if g.kind == CONDITIONED:
        inner_u = circuit_unitary(g.inner)
        return _conditioned_unitary(inner_u, n, g.qubits[0], g.polarity, g.targets)
    perm, phases = _monomial(g, n)
    out = np.zeros((N, N), dtype=complex)
    out[perm, np.arange(N)] = phases
    return out


def _monomial(g: Gate, n: int):
    """(perm, phases) with U|i> = phases[i] |perm[i]> for monomial gates."""
    N = 1 << n
    perm = np.arange(N)
    phases = np.ones(N, dtype=complex)
    if g.kind == NOT:
        q = g.qubits[0]
        perm = np.array([_flip(i, q, n) for i in range(N)])
    elif g.kind == CNOT:
        c, t = g.qubits
        perm = np.array([_flip(i, t, n) if _bit(i, c, n) else i for i in range(N)])
    elif g.kind == SWAP:
        a, b = g.qubits

        def sw(i):
            ba, bb = _bit(i, a, n), _bit(i, b, n)
            if ba != bb:
                i = _flip(_flip(i, a, n), b, n)
            return i

        perm = np.array([sw(i) for i in range(N)])
    elif g.kind == CZ:
        a, b = g.qubits
        phases = np.array([-1.0 if _bit(i, a, n) and _bit(i, b, n) else 1.0
                           for i in range(N)], dtype=complex)
    elif g.kind == PHASE_S:
        q = g.qubits[0]
        phases = np.array([_I4[(g.power * _bit(i, q, n)) % 4] for i in range(N)])
    elif g.kind == GEN_TOFFOLI:
        t = g.qubits[0]

        def tof(i):
            if all(_bit(i, q, n) == pol for q, pol in g.controls):
                return _flip(i, t, n)
            return i

        perm = np.array([tof(i) for i in range(N)])
    elif g.kind == PERM_PHASE:
        perm = np.array(g.perm)
        phases = _I4[np.array(g.phase_pows) % 4]
    else:
        raise ValueError(f"unknown gate kind {g.kind!r}")
    return perm, phases


def _conditioned_unitary(inner_u: np.ndarray, n: int, control: int,
                         polarity: int, targets: tuple[int, ...]) -> np.ndarray:
    N = 1 << n
    k = len(targets)
    out = np.zeros((N, N), dtype=complex)
    for i in range(N):
        if _bit(i, control, n) != polarity:
            out[i, i] = 1.0
            continue
        sub = 0
        for j, q in enumerate(targets):
            sub |= _bit(i, q, n) << (k - 1 - j)
        for sub_out in range(N >> (n - k)):
            amp = inner_u[sub_out, sub]
            if amp == 0:
                continue
            i_out = i
            for j, q in enumerate(targets):
                want = (sub_out >> (k - 1 - j)) & 1
                if _bit(i_out, q, n) != want:
                    i_out = _flip(i_out, q, n)
            out[i_out, i] += amp
    return out


def circuit_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(c.dim, dtype=complex)
    for g in c.gates:
        u = gate_unitary(g, c.n_qubits) @ u
    return u


def apply_circuit(rho: np.ndarray, c: Circuit) -> np.ndarray:
    """U rho U^dagger for the circuit's composed unitary."""
    if rho.shape != (c.dim, c.dim):
        raise ValueError(
            f"state dimension {rho.shape} does not match {c.n_qubits} qubits")
    u = circuit_unitary(c)
    return u @ rho @ u.conj().T


def on_register(c: Circuit, n_qubits: int) -> Circuit:
    """Same gates on a larger register (qubit indices unchanged)."""
    if n_qubits < c.n_qubits:
        raise ValueError("target register is smaller than the circuit")
    return Circuit(n_qubits, c.gates)


def gate_to_dict(g: Gate) -> dict:
    d: dict = {"kind": g.kind}
    if g.qubits:
        d["qubits"] = list(g.qubits)
    if g.controls:
        d["controls"] = [list(p) for p in g.controls]
    if g.kind == PHASE_S:
        d["power"] = g.power
    if g.kind == PERM_PHASE:
        d["perm"] = list(g.perm)
        d["phase_pows"] = list(g.phase_pows)
    if g.kind == CONDITIONED:
        d["polarity"] = g.polarity
        d["targets"] = list(g.targets)
        d["inner"] = circuit_to_dict(g.inner)
    return d


def gate_from_dict(d: dict) -> Gate:
    kind = d["kind"]
    inner = circuit_from_dict(d["inner"]) if "inner" in d else None
    return Gate(
        kind,
        qubits=tuple(d.get("qubits", ())),
        controls=tuple(tuple(p) for p in d.get("controls", ())),
        power=d.get("power", 1),
        perm=tuple(d.get("perm", ())),
        phase_pows=tuple(d.get("phase_pows", ())),
        inner=inner,
        polarity=d.get("polarity", 1),
        targets=tuple(d.get("targets", ())),
    )


def circuit_to_dict(c: Circuit) -> dict:
    return {"n_qubits": c.n_qubits, "gates": [gate_to_dict(g) for g in c.gates]}


def circuit_from_dict(d: dict) -> Circuit:
    return Circuit(d["n_qubits"], tuple(gate_from_dict(g) for g in d["gates"]))


def circuit_to_json(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c))


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
