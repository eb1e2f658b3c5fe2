"""Dense density-matrix states, observables and the noisy readout model.

Density matrices are plain complex ndarrays of shape (2^n, 2^n).
Qubit 0 is the most significant bit of the basis index, and the readout
observable is the z spin of qubit 0.  The ensemble measurement returns
the exact expectation plus additive Gaussian noise of standard
deviation ``noise_std``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

N_QUBITS_MAX = 12


@dataclass(frozen=True)
class ThermalSpec:
    """Per-qubit polarizations and the diagonal model built from them.

    ``first-order`` gives diagonal entries (1 + sum_i (-1)^(b_i) d_i)/N;
    ``exact-product`` gives prod_i (1 + (-1)^(b_i) d_i)/2.  The
    polarization d_i folds the inverse temperature and the qubit's level
    splitting into one dimensionless number.
    """

    deltas: tuple[float, ...]
    mode: str = "first-order"

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if self.mode not in ("first-order", "exact-product"):
            raise ValueError(f"unknown thermal mode {self.mode!r}")
        if any(abs(d) >= 1.0 for d in self.deltas):
            raise ValueError("polarizations must satisfy |delta| < 1")


@dataclass(frozen=True)
class MeasurementModel:
    noise_std: float = 0.0

    def __post_init__(self):
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")


@dataclass(frozen=True)
class Observable:
    matrix: np.ndarray
    label: str = ""


class DeviationParts(NamedTuple):
    p_bar: float
    check: np.ndarray  # rho minus its averaged effective-pure projection
    check_d: np.ndarray  # diagonal part on indices >= 1
    check_0: np.ndarray  # row-0/column-0 border part
    check_not0: np.ndarray  # remainder (check = check_0 + check_not0)


class ObservableParts(NamedTuple):
    s00: float
    d: np.ndarray  # diagonal part on indices >= 1
    check_0: np.ndarray  # row-0/column-0 border part
    check_not0: np.ndarray  # sigma - check_0 - s00 |0><0|


def n_qubits_of(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    n = int(dim).bit_length() - 1
    if rho.shape != (dim, dim) or (1 << n) != dim:
        raise ValueError(f"not a 2^n x 2^n matrix: shape {rho.shape}")
    return n


def check_density(rho: np.ndarray, check_psd: bool = False) -> None:
    """Validate Hermiticity/trace (1e-12) and optionally positivity (1e-10)."""
    n_qubits_of(rho)
    if not np.allclose(rho, rho.conj().T, atol=1e-12, rtol=0.0):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-12 or abs(np.trace(rho).imag) > 1e-12:
        raise ValueError("density matrix trace is not 1")
    if check_psd:
        eigs = np.linalg.eigvalsh(rho)
        if eigs.min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")


def basis_density(n: int, index: int) -> np.ndarray:
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[index, index] = 1.0
    return rho


def maximally_mixed(n: int) -> np.ndarray:
    dim = 1 << n
    return np.eye(dim, dtype=complex) / dim


def diagonal_density(diag) -> np.ndarray:
    diag = np.asarray(diag, dtype=float)
    if abs(diag.sum() - 1.0) > 1e-9:
        raise ValueError("diagonal does not sum to 1")
    return np.diag(diag.astype(complex))


def thermal_state(spec: ThermalSpec) -> np.ndarray:
    """Diagonal thermal state; trace is exactly 1 in both modes."""
    n = len(spec.deltas)
    if not 1 <= n <= N_QUBITS_MAX:
        raise ValueError(f"qubit count must be in [1, {N_QUBITS_MAX}]")
    dim = 1 << n
    deltas = np.asarray(spec.deltas)
    signs = np.array([[1.0 if not (i >> (n - 1 - q)) & 1 else -1.0
                       for q in range(n)] for i in range(dim)])
    if spec.mode == "first-order":
        total = float(np.sum(np.abs(deltas)))
        if total >= 0.1:
            warnings.warn(
                "first-order thermal model used with sum |delta_i| = "
                f"{total:.3g}; the linearization assumes it is << 1",
                stacklevel=2)
        diag = (1.0 + signs @ deltas) / dim
    else:
        diag = np.prod((1.0 + signs * deltas) / 2.0, axis=1)
    return np.diag(diag.astype(complex))


def sigma_z1_matrix(n: int) -> np.ndarray:
    """z spin of qubit 0 (the most significant bit)."""
    dim = 1 << n
    diag = np.array([1.0 if i < dim // 2 else -1.0 for i in range(dim)])
    return np.diag(diag.astype(complex))


def measure_sigma_z1(rho: np.ndarray,
                     model: MeasurementModel = MeasurementModel(0.0),
                     rng: np.random.Generator | None = None) -> float:
    """tr(rho sigma_z of qubit 0) plus Normal(0, noise_std^2) noise."""
    n = n_qubits_of(rho)
    half = 1 << (n - 1)
    diag = np.real(np.diag(rho))
    value = float(diag[:half].sum() - diag[half:].sum())
    if model.noise_std > 0.0:
        if rng is None:
            raise ValueError("rng required when noise_std > 0")
        value += rng.normal(0.0, model.noise_std)
    return value


def deviation_parts(rho: np.ndarray) -> DeviationParts:
    """Split rho into its effective-pure projection and deviation pieces.

    p_bar is the mean of the diagonal over indices >= 1; check is
    rho - p_bar I - (rho_00 - p_bar)|0><0|; check_d keeps the diagonal
    of check on indices >= 1; check_0 keeps row 0 and column 0; and
    check_not0 = check - check_0.
    """
    dim = rho.shape[0]
    diag = np.real(np.diag(rho))
    p_bar = float(diag[1:].sum() / (dim - 1))
    check = rho - p_bar * np.eye(dim) - (diag[0] - p_bar) * basis_density(
        n_qubits_of(rho), 0)
    check_d = np.diag(np.real(np.diag(check))).astype(complex)
    check_0 = np.zeros_like(check)
    check_0[0, 1:] = check[0, 1:]
    check_0[1:, 0] = check[1:, 0]
    check_not0 = check - check_0
    return DeviationParts(p_bar, check, check_d, check_0, check_not0)


def effective_pure_target(rho: np.ndarray) -> np.ndarray:
    """(rho_00 - p_bar)|0><0| + p_bar I for the input's diagonal."""
    dim = rho.shape[0]
    parts = deviation_parts(rho)
    out = parts.p_bar * np.eye(dim, dtype=complex)
    out[0, 0] += np.real(rho[0, 0]) - parts.p_bar
    return out


def observable_parts(sigma: np.ndarray) -> ObservableParts:
    s00 = float(np.real(sigma[0, 0]))
    d = np.zeros_like(sigma)
    idx = np.arange(1, sigma.shape[0])
    d[idx, idx] = np.real(sigma[idx, idx])
    check_0 = np.zeros_like(sigma)
    check_0[0, 1:] = sigma[0, 1:]
    check_0[1:, 0] = sigma[1:, 0]
    check_not0 = sigma - check_0
    check_not0[0, 0] = 0.0
    return ObservableParts(s00, d, check_0, check_not0)


def conjugated_observable(computation_unitary: np.ndarray) -> Observable:
    """sigma = C^dagger (sigma_z of qubit 0) C."""
    n = n_qubits_of(computation_unitary)
    sz = sigma_z1_matrix(n)
    return Observable(computation_unitary.conj().T @ sz @ computation_unitary,
                      label="C^dagger sigma_z(1) C")


def partial_trace_last(rho: np.ndarray, m: int) -> np.ndarray:
    """Trace out the last m qubits (the least significant bits)."""
    n = n_qubits_of(rho)
    if not 0 < m < n:
        raise ValueError("m must satisfy 0 < m < n_qubits")
    keep = 1 << (n - m)
    traced = 1 << m
    work = rho.reshape(keep, traced, keep, traced)
    return np.einsum("ikjk->ij", work)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def save_density_text(rho: np.ndarray, fh) -> None:
    """Plain-text format: header 'n=<int>', then N^2 lines 'row col re im'."""
    n = n_qubits_of(rho)
    fh.write(f"n={n}\n")
    dim = 1 << n
    for r in range(dim):
        for c in range(dim):
            fh.write(f"{r} {c} {rho[r, c].real:.17g} {rho[r, c].imag:.17g}\n")


def load_density_text(fh) -> np.ndarray:
    header = fh.readline().strip()
    if not header.startswith("n="):
        raise ValueError("missing 'n=' header")
    n = int(header[2:])
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=complex)
    for _ in range(dim * dim):
        r, c, re, im = fh.readline().split()
        rho[int(r), int(c)] = float(re) + 1j * float(im)
    return rho
