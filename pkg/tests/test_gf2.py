import numpy as np
import pytest

from tempavg import gf2
from tempavg.field import (FieldElement, GF2Field, gf2n_generator,
                           primitive_polynomial)

CHI2_99_DF5 = 15.086272469388987


def brute_mul_table(n, modulus):
    """Field multiplication table built by schoolbook polynomial arithmetic."""

    def polymul(a, b):
        r = 0
        shift = 0
        while b:
            if b & 1:
                r ^= a << shift
            b >>= 1
            shift += 1
        return r

    def polymod(a):
        while a.bit_length() >= modulus.bit_length():
            a ^= modulus << (a.bit_length() - modulus.bit_length())
        return a

    return {(a, b): polymod(polymul(a, b))
            for a in range(1 << n) for b in range(1 << n)}


def test_gf4_multiplication_matches_brute_force():
    fld = GF2Field(2)
    table = brute_mul_table(2, 0b111)
    for (a, b), want in table.items():
        assert fld.mul(a, b) == want
    # x * x = x + 1 and x * (x + 1) = 1
    assert fld.mul(0b10, 0b10) == 0b11
    assert fld.mul(0b10, 0b11) == 0b01


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_multiplicative_identity(n):
    fld = GF2Field(n)
    for a in range(fld.order):
        assert fld.mul(a, 1) == a


@pytest.mark.parametrize("n", [2, 3, 4])
def test_field_axioms_exhaustive(n):
    fld = GF2Field(n)
    elems = range(fld.order)
    for a in elems:
        for b in elems:
            assert fld.mul(a, b) == fld.mul(b, a)
            for c in elems:
                assert fld.mul(fld.mul(a, b), c) == fld.mul(a, fld.mul(b, c))
                assert fld.mul(a, b ^ c) == fld.mul(a, b) ^ fld.mul(a, c)


def test_generator_orders():
    assert GF2Field(1).generator() == 1
    assert GF2Field(1).element_order(1) == 1
    fld = GF2Field(2)
    g = fld.generator()
    assert g == 0b10 and fld.element_order(g) == 3
    fld3 = GF2Field(3)
    g3 = fld3.generator()
    # exhaustive order check by repeated multiplication
    value, order = g3, 1
    while value != 1:
        value = fld3.mul(value, g3)
        order += 1
    assert order == 7


def test_element_wrapper_modulus_mismatch():
    a = gf2n_generator(2)
    b = gf2n_generator(3)
    with pytest.raises(ValueError, match="mismatch"):
        _ = a * b
    assert (a * a).value == 0b11


def test_primitive_polynomial_table():
    assert [primitive_polynomial(n) for n in range(1, 6)] == [3, 7, 11, 19, 37]
    with pytest.raises(ValueError):
        primitive_polynomial(17)
    with pytest.raises(ValueError):
        primitive_polynomial(0)


def test_mult_matrix_identity_and_x_cycle():
    fld = GF2Field(2)
    assert np.array_equal(fld.mult_matrix(1), np.eye(2, dtype=np.uint8))
    L = fld.mult_matrix(0b10)
    # bit-vector basis (MSB first): 01 -> 10 -> 11 -> 01
    assert np.array_equal(gf2.mat_vec(L, np.array([0, 1], np.uint8)), [1, 0])
    assert np.array_equal(gf2.mat_vec(L, np.array([1, 0], np.uint8)), [1, 1])
    assert np.array_equal(gf2.mat_vec(L, np.array([1, 1], np.uint8)), [0, 1])
    with pytest.raises(ValueError):
        fld.mult_matrix(0)


def test_mult_matrix_generates_cyclic_group_of_order_seven():
    fld = GF2Field(3)
    L = fld.mult_matrix(fld.generator())
    seen = set()
    power = np.eye(3, dtype=np.uint8)
    for _ in range(7):
        power = gf2.mat_mul(L, power)
        seen.add(power.tobytes())
    assert len(seen) == 7
    assert np.array_equal(power, np.eye(3, dtype=np.uint8))


@pytest.mark.parametrize("n", [2, 3])
def test_mult_matrix_is_homomorphism(n):
    fld = GF2Field(n)
    for a in range(1, fld.order):
        for b in range(1, fld.order):
            lhs = gf2.mat_mul(fld.mult_matrix(a), fld.mult_matrix(b))
            assert np.array_equal(lhs, fld.mult_matrix(fld.mul(a, b)))


def test_int_bits_round_trip():
    for n in (1, 3, 6):
        for value in range(1 << n):
            assert gf2.bits_to_int(gf2.int_to_bits(value, n)) == value


def test_gaussian_decompose_examples():
    assert gf2.gaussian_decompose(np.eye(3, dtype=np.uint8)) == []
    L = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    ops = gf2.gaussian_decompose(L)
    assert ops == [(0, 1)]
    assert np.array_equal(gf2.compose_row_ops(ops, 2), L)
    with pytest.raises(ValueError):
        gf2.gaussian_decompose(np.zeros((2, 2), dtype=np.uint8))


def test_gaussian_decompose_recomposition_many_sizes():
    rng = np.random.default_rng(2024)
    for n in range(1, 9):
        for _ in range(125):
            L = gf2.random_invertible(n, rng)
            ops = gf2.gaussian_decompose(L)
            assert np.array_equal(gf2.compose_row_ops(ops, n), L)


def test_random_invertible_n1_and_validity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert np.array_equal(gf2.random_invertible(1, rng), [[1]])
    for n in (2, 3, 5, 8):
        for _ in range(50):
            assert gf2.is_invertible(gf2.random_invertible(n, rng))


def test_random_invertible_uniform_over_gl2():
    rng = np.random.default_rng(7)
    draws = 60000
    counts: dict[bytes, int] = {}
    for _ in range(draws):
        key = gf2.random_invertible(2, rng).tobytes()
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    p = 1.0 / 6.0
    sigma = np.sqrt(p * (1 - p) / draws)
    for count in counts.values():
        assert abs(count / draws - p) <= 3 * sigma


def test_symplectic_form_and_identity_membership():
    m = gf2.symplectic_form(2)
    assert np.array_equal(m, m.T)
    assert np.array_equal(gf2.mat_mul(m, m), np.eye(4, dtype=np.uint8))
    assert gf2.is_symplectic(np.eye(4, dtype=np.uint8))


def test_random_symplectic_validity():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 4):
        for _ in range(40):
            L = gf2.random_symplectic(n, rng)
            assert gf2.is_symplectic(L)
            assert gf2.is_invertible(L)


def test_random_symplectic_uniform_n1():
    rng = np.random.default_rng(12)
    draws = 60000
    counts: dict[bytes, int] = {}
    for _ in range(draws):
        key = gf2.random_symplectic(1, rng).tobytes()
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    expected = draws / 6
    stat = sum((c - expected) ** 2 / expected for c in counts.values())
    assert stat < CHI2_99_DF5


def test_random_symplectic_support_matches_enumeration():
    valid = {L.tobytes() for L in gf2.enumerate_symplectic(2)}
    assert len(valid) == 720
    rng = np.random.default_rng(5)
    seen = set()
    for _ in range(30000):
        seen.add(gf2.random_symplectic(2, rng).tobytes())
    assert seen <= valid
    assert len(seen) == 720


def test_symplectic_count():
    assert gf2.symplectic_count(1) == 6
    assert gf2.symplectic_count(2) == 720
    re_evaluated = ((2**6 - 1) * (2**5 - 2) * (2**4 - 4)) * (2**3 * 2**2 * 2**1)
    assert gf2.symplectic_count(3) == 1451520 == re_evaluated
    assert gf2.symplectic_count(1) == sum(1 for _ in gf2.enumerate_symplectic(1))


def test_rank_inverse_solve():
    rng = np.random.default_rng(9)
    for n in (2, 4, 6):
        L = gf2.random_invertible(n, rng)
        assert gf2.rank(L) == n
        inv = gf2.inverse(L)
        assert np.array_equal(gf2.mat_mul(inv, L), np.eye(n, dtype=np.uint8))
    singular = np.ones((3, 3), dtype=np.uint8)
    assert gf2.rank(singular) == 1
    with pytest.raises(ValueError):
        gf2.inverse(singular)
