"""Bit-vector / bit-matrix linear algebra over GF(2).

Bit vectors are 1-D ``uint8`` arrays with entries in {0, 1}; bit
matrices are 2-D ``uint8`` arrays.  A matrix acts on column bit
vectors.  An n-qubit basis-state index i corresponds to the bit vector
``int_to_bits(i, n)`` whose entry 0 is the most significant bit
(qubit 0).

Also provides uniform sampling of invertible matrices (column by
column, each new column outside the span of the previous ones) and of
matrices preserving the symplectic form ``[[0, I], [I, 0]]`` (column by
column through the affine solution space of the pairing constraints),
plus the elementary-row-operation decomposition used for CNOT circuit
synthesis.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from ._accel import maybe_njit

BITMATRIX_N_MAX = 32


def int_to_bits(value: int, n: int) -> np.ndarray:
    """Bit vector of length n for an integer, entry 0 = most significant."""
    return np.array([(value >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.uint8)


def bits_to_int(bits: np.ndarray) -> int:
    n = len(bits)
    return int(sum(int(bits[j]) << (n - 1 - j) for j in range(n)))


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2)."""
    return ((a.astype(np.uint32) @ b.astype(np.uint32)) & 1).astype(np.uint8)


def mat_vec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    return ((a.astype(np.uint32) @ v.astype(np.uint32)) & 1).astype(np.uint8)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


@maybe_njit(cache=True)
def _row_reduce(a):
    """In-place reduced row echelon form over GF(2).

    Returns (rank, pivots) where pivots[r] is the pivot column of row r.
    """
    rows, cols = a.shape
    pivots = np.full(rows, -1, np.int64)
    r = 0
    for c in range(cols):
        p = -1
        for i in range(r, rows):
            if a[i, c]:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(cols):
                t = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = t
        for i in range(rows):
            if i != r and a[i, c]:
                for j in range(cols):
                    a[i, j] ^= a[r, j]
        pivots[r] = c
        r += 1
        if r == rows:
            break
    return r, pivots


@maybe_njit(cache=True)
def _reduce_vector(w, ech, piv, m):
    """Reduce w in place against m echelon rows; return its pivot or -1."""
    for r in range(m):
        c = piv[r]
        if c >= 0 and w[c]:
            for j in range(w.shape[0]):
                w[j] ^= ech[r, j]
    for j in range(w.shape[0]):
        if w[j]:
            return j
    return -1


@maybe_njit(cache=True)
def _insert_echelon(w, nz, ech, piv, m):
    """Insert reduced vector w with pivot nz, keeping rows fully reduced."""
    for r in range(m):
        if ech[r, nz]:
            for j in range(w.shape[0]):
                ech[r, j] ^= w[j]
    ech[m, :] = w
    piv[m] = nz


def rank(a: np.ndarray) -> int:
    work = np.ascontiguousarray(a, dtype=np.uint8).copy()
    r, _ = _row_reduce(work)
    return int(r)


def is_invertible(a: np.ndarray) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a) == a.shape[0]


def inverse(a: np.ndarray) -> np.ndarray:
    """Inverse over GF(2); raises ValueError for singular input."""
    a = np.asarray(a, dtype=np.uint8)
    n = a.shape[0]
    aug = np.concatenate([a.copy(), identity(n)], axis=1)
    _, pivots = _row_reduce(aug)
    if not np.array_equal(pivots[:n], np.arange(n)):
        raise ValueError("matrix is singular over GF(2)")
    return aug[:, n:].copy()


@maybe_njit(cache=True)
def _random_outside_span(n, ech, piv, m, rng):
    """Uniform vector outside the span of m echelon rows (redraws inside)."""
    v = np.empty(n, np.uint8)
    while True:
        for i in range(n):
            v[i] = np.uint8(rng.integers(0, 2))
        w = v.copy()
        if _reduce_vector(w, ech, piv, m) >= 0:
            return v, w


@maybe_njit(cache=True)
def _random_invertible(n, rng):
    L = np.zeros((n, n), np.uint8)
    ech = np.zeros((n, n), np.uint8)
    piv = np.full(n, -1, np.int64)
    for k in range(n):
        v, w = _random_outside_span(n, ech, piv, k, rng)
        nz = -1
        for j in range(n):
            if w[j]:
                nz = j
                break
        _insert_echelon(w, nz, ech, piv, k)
        L[:, k] = v
    return L


def random_invertible(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of GL(n, 2), built column by column.

    Each new column is drawn uniformly outside the span of the columns
    chosen so far, so invertibility holds by construction and every
    invertible matrix is produced with equal probability.
    """
    if not 1 <= n <= BITMATRIX_N_MAX:
        raise ValueError(f"n must be in [1, {BITMATRIX_N_MAX}]")
    return _random_invertible(n, rng)


def symplectic_form(n_qubits: int) -> np.ndarray:
    """The 2n x 2n block matrix [[0, I], [I, 0]]."""
    n = n_qubits
    m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    m[:n, n:] = identity(n)
    m[n:, :n] = identity(n)
    return m


def is_symplectic(a: np.ndarray) -> bool:
    a = np.asarray(a, dtype=np.uint8)
    d = a.shape[0]
    if a.shape != (d, d) or d % 2:
        return False
    m = symplectic_form(d // 2)
    return bool(np.array_equal(mat_mul(mat_mul(a.T, m), a), m))


@maybe_njit(cache=True)
def _random_symplectic(nq, rng):
    d = 2 * nq
    L = np.zeros((d, d), np.uint8)
    for col in range(d):
        # Constraint rows: y . (M L_i) = M[col, i] for each earlier column i.
        aug = np.zeros((col, d + 1), np.uint8)
        for i in range(col):
            for j in range(d):
                aug[i, j] = L[(j + nq) % d, i]
            if col >= nq and i == col - nq:
                aug[i, d] = 1
        rnk, pivots = _row_reduce(aug)
        part = np.zeros(d, np.uint8)
        for r in range(rnk):
            if aug[r, d]:
                part[pivots[r]] = 1
        isfree = np.ones(d, np.uint8)
        for r in range(rnk):
            isfree[pivots[r]] = 0
        nfree = d - rnk
        null = np.zeros((nfree, d), np.uint8)
        idx = 0
        for j in range(d):
            if isfree[j]:
                null[idx, j] = 1
                for r in range(rnk):
                    if aug[r, j]:
                        null[idx, pivots[r]] = 1
                idx += 1
        y = np.zeros(d, np.uint8)
        if col < nq:
            # Homogeneous case: the span of the existing columns sits inside
            # the solution space.  Extend it to a basis by vectors S and take
            # (random nonzero combination of S) + (random column combination).
            ns = nfree - col
            S = np.zeros((ns, d), np.uint8)
            ech = np.zeros((d, d), np.uint8)
            piv = np.full(d, -1, np.int64)
            m = 0
            for i in range(col):
                w = L[:, i].copy()
                nz = _reduce_vector(w, ech, piv, m)
                _insert_echelon(w, nz, ech, piv, m)
                m += 1
            cnt = 0
            for t in range(nfree):
                w = null[t].copy()
                nz = _reduce_vector(w, ech, piv, m)
                if nz >= 0:
                    _insert_echelon(w, nz, ech, piv, m)
                    m += 1
                    S[cnt] = null[t]
                    cnt += 1
                    if cnt == ns:
                        break
            nonzero = False
            while not nonzero:
                for j in range(d):
                    y[j] = 0
                for t in range(ns):
                    if rng.integers(0, 2):
                        nonzero = True
                        for j in range(d):
                            y[j] ^= S[t, j]
            for i in range(col):
                if rng.integers(0, 2):
                    for j in range(d):
                        y[j] ^= L[j, i]
        else:
            # Affine case: particular solution plus random null combination.
            for j in range(d):
                y[j] = part[j]
            for t in range(nfree):
                if rng.integers(0, 2):
                    for j in range(d):
                        y[j] ^= null[t, j]
        L[:, col] = y
    return L


def random_symplectic(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform 2n x 2n matrix L with L^T M L = M over GF(2).

    Built column by column.  For the first n columns the pairing
    constraints are homogeneous and the new column is a random nonzero
    combination of basis vectors completing the current column span
    inside the solution space, plus a random combination of existing
    columns; for the remaining columns it is a uniform point of the
    affine solution space, which contains no span element.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return _random_symplectic(n_qubits, rng)


def symplectic_count(n_qubits: int) -> int:
    """Exact order of the group preserving the symplectic form."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    n = n_qubits
    count = 1
    for k in range(n):
        count *= (1 << (2 * n - k)) - (1 << k)
    for k in range(n):
        count *= 1 << (n - k)
    return count


def gaussian_decompose(L: np.ndarray) -> list[tuple[int, int]]:
    """Decompose invertible L into row additions (source, target).

    Each pair means "add row source into row target" and corresponds to
    one CNOT with control=source, target=target under |b> -> |Lb>.
    Composing the returned operations in list order reproduces L.
    """
    L = np.asarray(L, dtype=np.uint8)
    n = L.shape[0]
    if L.shape != (n, n):
        raise ValueError("matrix must be square")
    work = L.copy()
    ops: list[tuple[int, int]] = []

    def rowadd(src: int, tgt: int) -> None:
        work[tgt, :] ^= work[src, :]
        ops.append((src, tgt))

    for c in range(n):
        if not work[c, c]:
            p = -1
            for i in range(c + 1, n):
                if work[i, c]:
                    p = i
                    break
            if p < 0:
                raise ValueError("matrix is singular over GF(2)")
            rowadd(p, c)
        for i in range(n):
            if i != c and work[i, c]:
                rowadd(c, i)
    # work is now I; the recorded ops R_k..R_1 satisfy R_k...R_1 L = I, and
    # every row addition is an involution, so L = R_1 R_2 ... R_k.  Emitting
    # them reversed makes in-order composition rebuild L.
    ops.reverse()
    return ops


def compose_row_ops(ops: list[tuple[int, int]], n: int) -> np.ndarray:
    """Matrix effected by applying the row additions in list order."""
    out = identity(n)
    for src, tgt in ops:
        out[tgt, :] ^= out[src, :]
    return out


def enumerate_invertible(n: int):
    """All invertible n x n bit matrices (exhaustive; small n only)."""
    if n > 4:
        raise ValueError("exhaustive enumeration limited to n <= 4")
    for bits in product((0, 1), repeat=n * n):
        m = np.array(bits, dtype=np.uint8).reshape(n, n)
        if is_invertible(m):
            yield m


def enumerate_symplectic(n_qubits: int):
    """All 2n x 2n matrices with L^T M L = M (exhaustive; n_qubits <= 2)."""
    if n_qubits > 2:
        raise ValueError("exhaustive enumeration limited to n_qubits <= 2")
    d = 2 * n_qubits
    m = symplectic_form(n_qubits)
    for bits in product((0, 1), repeat=d * d):
        cand = np.array(bits, dtype=np.uint8).reshape(d, d)
        if np.array_equal(mat_mul(mat_mul(cand.T, m), cand), m):
            yield cand
