"""GF(2^n) arithmetic over a fixed primitive polynomial per degree.

Field elements are integers in [0, 2^n); bit j of the integer is the
coefficient of x^j.  The nonzero n-qubit basis state of index i is
identified with the field element of value i (reading the state's bit
string most-significant-qubit first makes qubit j carry the coefficient
of x^(n-1-j)).

The modulus for each degree is the lexicographically smallest primitive
polynomial, shipped as a static table (one hex mask per line, degree =
line index + 1) so that the induced state permutations are reproducible.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import gf2

FIELD_N_MAX = 16


@functools.lru_cache(maxsize=None)
def _poly_table() -> tuple[int, ...]:
    text = resources.files("tempavg.data").joinpath("primitive_polys.txt").read_text()
    return tuple(int(line, 16) for line in text.split())


def primitive_polynomial(n: int) -> int:
    """Modulus bit mask (including the x^n term) for degree n."""
    if not 1 <= n <= FIELD_N_MAX:
        raise ValueError(f"degree must be in [1, {FIELD_N_MAX}]")
    return _poly_table()[n - 1]


def _factorize(value: int) -> list[int]:
    factors = []
    d = 2
    while d * d <= value:
        while value % d == 0:
            factors.append(d)
            value //= d
        d += 1
    if value > 1:
        factors.append(value)
    return factors


class GF2Field:
    """The field with 2^n elements, elements represented as ints."""

    def __init__(self, n: int):
        self.n = n
        self.modulus = primitive_polynomial(n)
        self.order = 1 << n
        # Primitivity of the modulus is re-checked here: x must generate
        # the full multiplicative group.
        if n > 1 and self.element_order(2) != self.order - 1:
            raise ValueError("modulus is not primitive")

    def _check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of GF(2^{self.n})")
        return a

    def mul(self, a: int, b: int) -> int:
        a, b = self._check(a), self._check(b)
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if (a >> self.n) & 1:
                a ^= self.modulus
        return r

    def pow(self, a: int, k: int) -> int:
        a = self._check(a)
        if k < 0:
            raise ValueError("negative exponents not supported")
        result = 1
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def element_order(self, a: int) -> int:
        a = self._check(a)
        if a == 0:
            raise ValueError("0 has no multiplicative order")
        group = self.order - 1
        if self.pow(a, group) != 1:
            raise ValueError("element is not a unit of the quotient ring")
        order = group
        for q in set(_factorize(group)) if group > 1 else set():
            while order % q == 0 and self.pow(a, order // q) == 1:
                order //= q
        return order

    def generator(self) -> int:
        """An element of multiplicative order exactly 2^n - 1."""
        g = 1 if self.n == 1 else 2
        assert self.element_order(g) == self.order - 1
        return g

    def mult_matrix(self, a: int) -> np.ndarray:
        """n x n bit matrix L with L bits(b) = bits(a*b), MSB-first basis.

        Raises ValueError for a = 0 (not invertible).
        """
        a = self._check(a)
        if a == 0:
            raise ValueError("multiplication by 0 is not invertible")
        n = self.n
        L = np.zeros((n, n), dtype=np.uint8)
        for col in range(n):
            basis = 1 << (n - 1 - col)
            L[:, col] = gf2.int_to_bits(self.mul(a, basis), n)
        return L

    def mult_permutation(self, a: int) -> np.ndarray:
        """State permutation i -> a*i over [0, 2^n) (fixes 0)."""
        a = self._check(a)
        if a == 0:
            raise ValueError("multiplication by 0 is not a permutation")
        return np.array([self.mul(a, i) for i in range(self.order)], dtype=np.int64)

    def __eq__(self, other) -> bool:
        return isinstance(other, GF2Field) and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash(("GF2Field", self.modulus))

    def __repr__(self) -> str:
        return f"GF2Field(n={self.n}, modulus=0x{self.modulus:x})"


@dataclass(frozen=True)
class FieldElement:
    """An element tied to its field; products check for modulus mismatch."""

    field: GF2Field
    value: int

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field.modulus != self.field.modulus:
            raise ValueError("modulus mismatch between field elements")
        return FieldElement(self.field, self.field.mul(self.value, other.value))

    def __pow__(self, k: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.value, k))

    def bits(self) -> np.ndarray:
        return gf2.int_to_bits(self.value, self.field.n)


def gf2n_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def gf2n_generator(n: int) -> FieldElement:
    field = GF2Field(n)
    return FieldElement(field, field.generator())


def multiplication_matrix(a: FieldElement) -> np.ndarray:
    return a.field.mult_matrix(a.value)
