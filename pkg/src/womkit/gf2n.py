"""Arithmetic in GF(2^n) for 2 <= n <= 24.

Field elements double as n-bit words: bit i of the coefficient mask is the
coefficient of z^i, which gives a fixed bijection between the field and
{0,1}^n. Each width uses one canonical modulus (the irreducible polynomial
of degree n with the smallest integer encoding), so two fields of equal
width are the same field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

MIN_WIDTH = 2
MAX_WIDTH = 24


def _poly_mod(a: int, b: int) -> int:
    """Remainder of binary polynomial a modulo nonzero b."""
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, modulus: int, n: int) -> int:
    """Product of two binary polynomials of degree < n, reduced mod modulus."""
    top = 1 << n
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= modulus
    return acc


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(modulus: int) -> bool:
    """Whether a binary polynomial of degree >= 1 is irreducible over GF(2).

    Uses the Frobenius criterion: f of degree n is irreducible iff
    z^(2^n) = z mod f and gcd(z^(2^(n/p)) - z, f) = 1 for every prime p
    dividing n.
    """
    n = modulus.bit_length() - 1
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n == 1:
        return True
    if not modulus & 1:
        return False  # divisible by z
    checkpoints = {n // p for p in _prime_divisors(n)}
    z = 0b10
    power = z
    for i in range(1, n + 1):
        power = _mulmod(power, power, modulus, n)
        if i in checkpoints and _poly_gcd(power ^ z, modulus) != 1:
            return False
    return power == z


@dataclass(frozen=True, slots=True)
class FieldSpec:
    """GF(2^n): bit width and irreducible modulus mask (leading term included)."""

    n: int
    modulus: int

    def __post_init__(self):
        if not MIN_WIDTH <= self.n <= MAX_WIDTH:
            raise ValueError(f"field width must be in {MIN_WIDTH}..{MAX_WIDTH}, got {self.n}")
        if self.modulus.bit_length() != self.n + 1:
            raise ValueError(f"modulus 0b{self.modulus:b} does not have degree {self.n}")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus 0b{self.modulus:b} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.n


@dataclass(frozen=True, slots=True)
class FieldElement:
    """Element of GF(2^n): bit i of coeffs is the coefficient of z^i."""

    spec: FieldSpec
    coeffs: int

    def __post_init__(self):
        if not 0 <= self.coeffs < self.spec.order:
            raise ValueError(f"coefficient mask 0x{self.coeffs:x} out of range for n={self.spec.n}")


@lru_cache(maxsize=None)
def canonical_spec(n: int) -> FieldSpec:
    """The field of width n with the smallest-mask irreducible modulus."""
    if not MIN_WIDTH <= n <= MAX_WIDTH:
        raise ValueError(f"field width must be in {MIN_WIDTH}..{MAX_WIDTH}, got {n}")
    # Constant term must be 1, otherwise z divides the candidate.
    for candidate in range((1 << n) + 1, 1 << (n + 1), 2):
        if is_irreducible(candidate):
            return FieldSpec(n, candidate)
    raise AssertionError(f"no irreducible polynomial of degree {n}")  # unreachable


def _require_same_spec(x: FieldElement, y: FieldElement) -> None:
    if x.spec != y.spec:
        raise ValueError("operands belong to different fields")


def field_add(x: FieldElement, y: FieldElement) -> FieldElement:
    """Sum in GF(2^n): coordinatewise XOR of coefficient masks."""
    _require_same_spec(x, y)
    return FieldElement(x.spec, x.coeffs ^ y.coeffs)


def field_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    """Product in GF(2^n), reduced by the spec's modulus."""
    _require_same_spec(x, y)
    return FieldElement(x.spec, mul_bits(x.spec, x.coeffs, y.coeffs))


def mul_bits(spec: FieldSpec, a: int, b: int) -> int:
    """Low-level product on raw coefficient masks (hot-path form of field_mul)."""
    return _mulmod(a, b, spec.modulus, spec.n)
