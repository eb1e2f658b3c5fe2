"""Signal-to-noise bounds, variance formulas and Monte-Carlo estimators.

The single-experiment figure of merit for a randomized preparation P is
r(P) = tr(P rho P^dagger sigma) with sigma the computation-conjugated
readout observable; its variance over the randomization adds to the
measurement noise in the SNR denominator.  Exact evaluators are
provided for randomization by diagonal phases plus a two-transitive
linear group and plus the cyclic group, together with closed-form upper
bounds, the coefficient recursion for the conditional-normalizer
pipeline, and seeded Monte-Carlo estimators for everything else.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._accel import maybe_njit
from . import gf2
from .field import GF2Field
from .groups import (element_unitary, sample_conditional_normalizer,
                     sample_diagonal)
from .protocols import flip_swap_circuit
from .circuits import circuit_unitary
from .qcore import deviation_parts, n_qubits_of, observable_parts

_I4 = np.array([1.0, 1.0j, -1.0, -1.0j])

SNR_METHODS = (
    "exhaustive",
    "randomized_flip_swap",
    "labeled_flip_swap",
    "two_transitive",
    "conditional_normalizer",
    "fully_randomized_flip_swap",
)


@dataclass(frozen=True)
class SNRInputs:
    n: int
    snr1: float  # single-spin polarization over noise standard deviation
    x: float  # deterministic-output magnitude, |sigma_00|
    delta: float | None = None

    def __post_init__(self):
        if self.snr1 <= 0:
            raise ValueError("snr1 must be positive")
        if abs(self.x) > 1.0 + 1e-12:
            raise ValueError("|x| must be <= 1")


def snr_bound(method: str, inputs: SNRInputs) -> float:
    """Closed-form SNR lower bound for one run of the named protocol.

    Conventions: one experiment for randomization over a group, two for
    the flip&swap pairs, 2^n - 1 for exhaustive averaging.
    """
    n, s1, x = inputs.n, inputs.snr1, abs(inputs.x)
    if n < 2:
        raise ValueError("n must be >= 2")
    N = 2.0**n
    if method == "exhaustive":
        return (n / N) * math.sqrt(N - 1) * x * s1
    if method == "randomized_flip_swap":
        return (n / N) * x * s1 / math.sqrt(0.5 + n**2 * s1**2 / (N * (N - 2)))
    if method == "labeled_flip_swap":
        return math.sqrt(2.0) * (n + 1) * x * s1 / N
    if method == "two_transitive":
        return (n / N) * x * s1 / math.sqrt(1.0 + n * s1**2 / (N - 2))
    if method == "conditional_normalizer":
        return (n / N) * x * s1 / math.sqrt(1.0 + 2 * n * s1**2 / (N * (N - 1)))
    if method == "fully_randomized_flip_swap":
        return (n / N) * x * s1 / math.sqrt(
            0.5 + 2 * n**2 * s1**2 / (N**2 * (N - 1)))
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# exact variance evaluators and bounds


def _tr2(a: np.ndarray) -> float:
    return float(np.real(np.einsum("ij,ji->", a, a)))


def variance_exact_two_transitive(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Exact variance of r(P) for diagonal phases + two-transitive maps."""
    N = rho.shape[0]
    p = deviation_parts(rho)
    s = observable_parts(sigma)
    a = _tr2(p.check_d)
    trd = float(np.real(np.trace(p.check_d)))
    sd2 = _tr2(s.d)
    sd = float(np.real(np.trace(s.d)))
    term1 = a * sd2 / (N - 1)
    term2 = (trd**2 - a) * (sd**2 - sd2) / ((N - 1) * (N - 2))
    term3 = ((_tr2(p.check_not0) - a) * (_tr2(s.check_not0) - sd2)
             / ((N - 1) * (N - 2)))
    term4 = _tr2(p.check_0) * _tr2(s.check_0) / (2 * (N - 1))
    return term1 + term2 + term3 + term4


def variance_exact_cyclic(rho: np.ndarray, sigma: np.ndarray,
                          fld: GF2Field) -> float:
    """Exact variance of r(P) for diagonal phases + the cyclic group."""
    N = rho.shape[0]
    if fld.order != N:
        raise ValueError("field size does not match the state")
    p = deviation_parts(rho)
    dev = np.real(np.diag(p.check))
    sig = np.real(np.diag(sigma))
    perm = fld.mult_permutation(fld.generator())
    total = 0.0
    current = np.arange(N)
    for k in range(N - 1):
        idx = current[1:]
        rho_corr = float(np.dot(dev[1:], dev[idx]))
        sig_corr = float(np.dot(sig[1:], sig[idx]))
        total += rho_corr * sig_corr / (N - 1)
        if k > 0:
            off_rho = float(np.real(np.sum(
                p.check[np.arange(1, N), idx]
                * p.check[idx, np.arange(1, N)])))
            off_sig = float(np.real(np.sum(
                sigma[idx, np.arange(1, N)] * sigma[np.arange(1, N), idx])))
            total += off_rho * off_sig / (N - 1)
        current = perm[current]
    total += _tr2(p.check_0) * _tr2(observable_parts(sigma).check_0) / (2 * (N - 1))
    return total


def variance_bound_two_transitive(rho: np.ndarray) -> float:
    p = deviation_parts(rho)
    N = rho.shape[0]
    return _tr2(p.check_d) + _tr2(p.check) / (N - 2)


def variance_bound_unitary(rho: np.ndarray) -> float:
    p = deviation_parts(rho)
    N = rho.shape[0]
    return _tr2(p.check) / (N - 2)


def conditional_lambda(n: int) -> float:
    N = 1 << n
    return math.exp(1.0 / (N + 2)) / 2.0


def variance_bound_conditional(rho: np.ndarray, k: int) -> float:
    """lambda^k N/(N-2) tr(check_d^2) + tr(check^2)/(N-2)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    p = deviation_parts(rho)
    N = rho.shape[0]
    n = n_qubits_of(rho)
    lam = conditional_lambda(n)
    return (lam**k * (N / (N - 2)) * _tr2(p.check_d)
            + _tr2(p.check) / (N - 2))


def variance_bound_fully_randomized(rho_sym: np.ndarray) -> float:
    """2 tr(check^2)/(N-1) for the symmetrized flip&swap input."""
    p = deviation_parts(rho_sym)
    N = rho_sym.shape[0]
    return 2.0 * _tr2(p.check) / (N - 1)


# ---------------------------------------------------------------------------
# conditional-normalizer coefficient recursion


def conditional_recursion_start(rho: np.ndarray) -> tuple[float, float, float, float]:
    """Coefficients (alpha, beta, gamma, delta) of the doubled-state
    average over diagonal + two-transitive randomization, in the basis
    (diagonal-pair, exchange, product, border) four-tensors."""
    N = rho.shape[0]
    p = deviation_parts(rho)
    a = _tr2(p.check_d)
    b = _tr2(p.check_not0)
    r0 = _tr2(p.check_0)
    alpha0 = (N * a - b) / ((N - 1) * (N - 2))
    beta0 = (b - a) / ((N - 1) * (N - 2))
    gamma0 = -a / ((N - 1) * (N - 2))
    delta0 = r0 / (2 * (N - 1))
    return alpha0, beta0, gamma0, delta0


def recursion_coefficients(alpha0: float, beta0: float, gamma0: float,
                           delta0: float, n: int, k: int) -> np.ndarray:
    """Iterate the conditional-normalizer step map k times.

    Returns an array of shape (k+1, 4) whose row j holds
    (alpha_j, beta_j, gamma_j, delta); row 0 repeats the inputs.
    alpha contracts geometrically while beta and gamma increase
    monotonically toward beta0 + alpha0/N and gamma0 + alpha0/N.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    N = 1 << n
    shrink = 1.0 - N**2 / (2.0 * (N - 1) * (N + 2))
    feed = N / (2.0 * (N + 2) * (N - 1))
    out = np.empty((k + 1, 4))
    out[0] = (alpha0, beta0, gamma0, delta0)
    for j in range(k):
        a, b, g, d = out[j]
        out[j + 1] = (shrink * a, b + feed * a, g + feed * a, d)
    return out


def conditional_variance_from_coefficients(coeffs, sigma: np.ndarray) -> float:
    """Contract (alpha, beta, gamma, delta) with the observable traces."""
    alpha, beta, gamma, delta = coeffs
    s = observable_parts(sigma)
    return (alpha * _tr2(s.d) + beta * _tr2(s.check_not0)
            + gamma * float(np.real(np.trace(s.d)))**2 + delta * _tr2(s.check_0))


# ---------------------------------------------------------------------------
# four-tensor basis (dense realization for small n)


def four_tensor_basis(n: int) -> dict[str, np.ndarray]:
    """Dense (N,N,N,N) realizations of the invariant four-tensors.

    Indices run over nonzero basis states; the sector split follows the
    conditioning qubit (the last one), so sector 1 holds the odd
    indices.  Keys: D, E, J, Z1, Z2, D0, D1, and Eab/Jab for sector
    pairs a,b in {0,1}.
    """
    if n > 3:
        raise ValueError("dense four-tensor basis capped at n <= 3")
    N = 1 << n
    basis = {name: np.zeros((N, N, N, N)) for name in
             ["D", "E", "J", "Z1", "Z2", "D0", "D1",
              "E00", "E01", "E10", "E11", "J00", "J01", "J10", "J11"]}
    for i in range(1, N):
        si = i & 1
        basis["D"][i, i, i, i] = 1.0
        basis[f"D{si}"][i, i, i, i] = 1.0
        basis["Z1"][0, i, i, 0] = 1.0
        basis["Z2"][i, 0, 0, i] = 1.0
        for j in range(1, N):
            sj = j & 1
            basis["E"][i, i, j, j] = 1.0
            basis["J"][i, j, j, i] = 1.0
            basis[f"E{si}{sj}"][i, i, j, j] = 1.0
            basis[f"J{si}{sj}"][i, j, j, i] = 1.0
    return basis


def tensor_coefficients(tensor: np.ndarray, basis: dict[str, np.ndarray],
                        names: list[str]) -> tuple[np.ndarray, float]:
    """Least-squares expansion of a four-tensor over named basis entries;
    returns (coefficients, residual norm)."""
    mat = np.stack([basis[name].ravel() for name in names], axis=1)
    target = np.real(tensor.ravel())
    if np.abs(np.imag(tensor)).max() > 1e-10:
        raise ValueError("tensor has an imaginary part")
    coeffs, *_ = np.linalg.lstsq(mat, target, rcond=None)
    residual = float(np.linalg.norm(mat @ coeffs - target))
    return coeffs, residual


def pi2_of_state(rho_like: np.ndarray) -> np.ndarray:
    """The doubled tensor A x A of a matrix as an (N,N,N,N) array."""
    return np.einsum("ij,kl->ijkl", rho_like, rho_like)


# ---------------------------------------------------------------------------
# Monte-Carlo estimators


class EmpiricalMoments(NamedTuple):
    mean: float
    variance: float
    stderr_mean: float
    stderr_variance: float
    trials: int


def moments_from_samples(values: np.ndarray) -> EmpiricalMoments:
    values = np.asarray(values, dtype=float)
    t = values.size
    if t < 2:
        raise ValueError("need at least 2 samples")
    mean = float(values.mean())
    variance = float(values.var(ddof=1))
    centered = values - mean
    m4 = float(np.mean(centered**4))
    stderr_variance = math.sqrt(max(m4 - variance**2, 0.0) / t)
    return EmpiricalMoments(mean, variance, math.sqrt(variance / t),
                            stderr_variance, t)


def empirical_variance(sampler: Callable[[int, np.random.Generator], np.ndarray],
                       trials: int, rng: np.random.Generator) -> EmpiricalMoments:
    """Noiseless Monte Carlo of r(P); sampler(trials, rng) -> values."""
    if trials < 2:
        raise ValueError("trials must be >= 2")
    return moments_from_samples(sampler(trials, rng))


@maybe_njit(cache=True)
def _linear_perm_r_samples(dev_diag, sig_diag, trials, n, rng):
    N = dev_diag.shape[0]
    out = np.empty(trials, np.float64)
    for t in range(trials):
        L = gf2._random_invertible(n, rng)
        r = 0.0
        for i in range(1, N):
            j = 0
            for row in range(n):
                bit = 0
                for col in range(n):
                    if L[row, col] and (i >> (n - 1 - col)) & 1:
                        bit ^= 1
                j |= bit << (n - 1 - row)
            r += dev_diag[i] * sig_diag[j]
        out[t] = r
    return out


@functools.lru_cache(maxsize=None)
def _bit_table(n: int) -> np.ndarray:
    N = 1 << n
    return np.array([gf2.int_to_bits(i, n) for i in range(N)], dtype=np.int64)


def _perm_of_matrix(L: np.ndarray, n: int) -> np.ndarray:
    out_bits = (_bit_table(n) @ L.T.astype(np.int64)) % 2
    powers = 1 << np.arange(n - 1, -1, -1)
    return out_bits @ powers


def _apply_perm(state: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.empty_like(state)
    out[np.ix_(perm, perm)] = state
    return out


def make_dxt_sampler(rho: np.ndarray, sigma: np.ndarray):
    """Sampler of r(P) = tr(P check P^dag sigma) for P = (linear map)(phases).

    Diagonal inputs take a compiled path (phases act trivially there, so
    only the permutation is drawn); general inputs follow the plain
    per-trial path with both factors sampled.
    """
    n = n_qubits_of(rho)
    check = deviation_parts(rho).check
    off = check - np.diag(np.diag(check))
    if np.abs(off).max() == 0.0:
        dev = np.ascontiguousarray(np.real(np.diag(check)))
        sig = np.ascontiguousarray(np.real(np.diag(sigma)))

        def sample(trials: int, rng: np.random.Generator) -> np.ndarray:
            return _linear_perm_r_samples(dev, sig, trials, n, rng)

        return sample

    def sample(trials: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(trials)
        for t in range(trials):
            phases = _I4[sample_diagonal(n, rng).phase_pows()]
            m = phases[:, None] * check * phases.conj()[None, :]
            perm = _perm_of_matrix(gf2.random_invertible(n, rng), n)
            m = _apply_perm(m, perm)
            out[t] = float(np.real(np.einsum("ij,ji->", m, sigma)))
        return out

    return sample


def make_cyclic_sampler(rho: np.ndarray, sigma: np.ndarray, fld: GF2Field):
    """Sampler of r(P) for P = (cyclic multiplication)(diagonal phases)."""
    n = n_qubits_of(rho)
    check = deviation_parts(rho).check
    perms = [fld.mult_permutation(fld.pow(fld.generator(), k))
             for k in range(fld.order - 1)]

    def sample(trials: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(trials)
        for t in range(trials):
            phases = _I4[sample_diagonal(n, rng).phase_pows()]
            m = phases[:, None] * check * phases.conj()[None, :]
            m = _apply_perm(m, perms[int(rng.integers(0, len(perms)))])
            out[t] = float(np.real(np.einsum("ij,ji->", m, sigma)))
        return out

    return sample


def _sample_pipeline_ops(n: int, k: int, rng: np.random.Generator,
                         include_diagonal: bool) -> list[tuple[str, np.ndarray]]:
    ops: list[tuple[str, np.ndarray]] = []
    if include_diagonal:
        ops.append(("phase", _I4[sample_diagonal(n, rng).phase_pows()]))
    ops.append(("perm", _perm_of_matrix(gf2.random_invertible(n, rng), n)))
    for _ in range(k):
        u = element_unitary(sample_conditional_normalizer(n, rng))
        ops.append(("unitary", u))
        ops.append(("perm", _perm_of_matrix(gf2.random_invertible(n, rng), n)))
    return ops


def _apply_pipeline_ops(state: np.ndarray, ops) -> np.ndarray:
    m = state
    for kind, op in ops:
        if kind == "phase":
            m = op[:, None] * m * op.conj()[None, :]
        elif kind == "perm":
            m = _apply_perm(m, op)
        else:
            m = op @ m @ op.conj().T
    return m


def make_conditional_sampler(rho: np.ndarray, sigma: np.ndarray, k: int):
    """Sampler of r(P) for the k-step conditional-normalizer pipeline."""
    n = n_qubits_of(rho)
    check = deviation_parts(rho).check

    def sample(trials: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(trials)
        for t in range(trials):
            ops = _sample_pipeline_ops(n, k, rng, include_diagonal=True)
            m = _apply_pipeline_ops(check, ops)
            out[t] = float(np.real(np.einsum("ij,ji->", m, sigma)))
        return out

    return sample


def make_fully_randomized_sampler(rho: np.ndarray, sigma: np.ndarray, k: int):
    """Sampler of the pair-averaged value for fully randomized flip&swap.

    Each trial draws one operator sequence, evaluates the bare and the
    flip&swapped branch with it, and returns the average of the two
    measurements, whose spread over trials is the randomization
    variance of the protocol.
    """
    n = n_qubits_of(rho)
    fs = circuit_unitary(flip_swap_circuit(n))
    rho_fs = fs @ rho @ fs.conj().T

    def sample(trials: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty(trials)
        for t in range(trials):
            ops = _sample_pipeline_ops(n, k, rng, include_diagonal=False)
            v1 = np.real(np.einsum("ij,ji->", _apply_pipeline_ops(rho, ops), sigma))
            v2 = np.real(np.einsum("ij,ji->", _apply_pipeline_ops(rho_fs, ops),
                                   sigma))
            out[t] = 0.5 * float(v1 + v2)
        return out

    return sample


# ---------------------------------------------------------------------------
# decision procedures


class SignDecision(NamedTuple):
    sign: int
    k2: int
    samples_used: int


def sign_decision(stream, snr: float, k1: int) -> SignDecision:
    """Sign of the median of k1 block averages of k2 = max(1, 4/snr^2).

    Distribution free: each block average has the wrong sign with
    probability at most 1/4, so the median errs with probability
    exponentially small in k1.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    if k1 < 1 or k1 % 2 == 0:
        raise ValueError("k1 must be a positive odd integer")
    k2 = max(1, math.ceil(4.0 / snr**2))
    values = np.asarray(stream, dtype=float).ravel()
    need = k1 * k2
    if values.size < need:
        raise ValueError(f"need {need} samples, got {values.size}")
    blocks = values[:need].reshape(k1, k2).mean(axis=1)
    med = float(np.median(blocks))
    sign = 1 if med > 0 else (-1 if med < 0 else 0)
    return SignDecision(sign, k2, need)


def experiments_needed(confidence: float, snr: float, epsilon: float) -> int:
    """ceil(log(1/c) / (eps^2 snr^2)), at least 1 (unit constant)."""
    if not 0 < confidence < 1:
        raise ValueError("confidence must be in (0, 1)")
    if snr <= 0 or epsilon <= 0:
        raise ValueError("snr and epsilon must be positive")
    return max(1, math.ceil(math.log(1.0 / confidence) / (epsilon**2 * snr**2)))


@dataclass(frozen=True)
class SNRReport:
    protocol: str
    n: int
    analytic_bound: float
    exact_variance: float | None
    empirical_mean: float
    empirical_variance: float
    trials: int
    seed: int

    def csv_row(self) -> str:
        exact = "" if self.exact_variance is None else f"{self.exact_variance:.17g}"
        return (f"{self.protocol},{self.n},{exact},{self.analytic_bound:.17g},"
                f"{self.empirical_mean:.17g},{self.empirical_variance:.17g},"
                f"{self.trials},{self.seed}")
