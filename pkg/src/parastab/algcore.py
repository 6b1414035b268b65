"""Scalar arithmetic: F_p, Z/p^N, the additive character psi, and exact cyclotomics."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

TOL = 1e-8
SUPPORTED_PRIMES = (3, 5, 7)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _check_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


@dataclass(frozen=True, slots=True)
class PrimeFieldElement:
    value: int
    p: int

    def __post_init__(self) -> None:
        _check_odd_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other: PrimeFieldElement | int) -> int:
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.value
        return int(other)

    def __add__(self, other: PrimeFieldElement | int) -> PrimeFieldElement:
        return PrimeFieldElement(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other: PrimeFieldElement | int) -> PrimeFieldElement:
        return PrimeFieldElement(self.value - self._coerce(other), self.p)

    def __neg__(self) -> PrimeFieldElement:
        return PrimeFieldElement(-self.value, self.p)

    def __mul__(self, other: PrimeFieldElement | int) -> PrimeFieldElement:
        return PrimeFieldElement(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def inverse(self) -> PrimeFieldElement:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return PrimeFieldElement(pow(self.value, -1, self.p), self.p)

    def __pow__(self, k: int) -> PrimeFieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        return PrimeFieldElement(pow(self.value, k, self.p), self.p)

    def order(self) -> int:
        """Multiplicative order."""
        return multiplicative_order(self.value, self.p)


@dataclass(frozen=True, slots=True)
class ResidueRingElement:
    value: int
    p: int
    N: int

    def __post_init__(self) -> None:
        _check_odd_prime(self.p)
        if self.N < 1:
            raise ValueError("N must be positive")
        object.__setattr__(self, "value", self.value % self.p**self.N)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def valuation(self) -> int:
        """p-adic valuation, capped at N for zero."""
        if self.value == 0:
            return self.N
        v, x = 0, self.value
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def __add__(self, other: ResidueRingElement) -> ResidueRingElement:
        return ResidueRingElement(self.value + other.value, self.p, self.N)

    def __mul__(self, other: ResidueRingElement) -> ResidueRingElement:
        return ResidueRingElement(self.value * other.value, self.p, self.N)

    def inverse(self) -> ResidueRingElement:
        if not self.is_unit():
            raise ZeroDivisionError("non-unit in Z/p^N")
        return ResidueRingElement(pow(self.value, -1, self.modulus), self.p, self.N)


def psi(t: PrimeFieldElement | int, p: int | None = None) -> complex:
    """The additive character t -> exp(2 pi i t / p)."""
    if isinstance(t, PrimeFieldElement):
        value, p = t.value, t.p
    else:
        if p is None:
            raise ValueError("p is required for integer arguments")
        value = int(t) % p
    return cmath.exp(2j * math.pi * value / p)


def psi_array(t: np.ndarray, p: int) -> np.ndarray:
    """Vectorized psi on integer arrays (reduced mod p first)."""
    return np.exp(2j * np.pi * (np.asarray(t) % p) / p)


def multiplicative_order(a: int, m: int) -> int:
    a %= m
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit mod {m}")
    k, x = 1, a
    while x != 1:
        x = x * a % m
        k += 1
    return k


@lru_cache(maxsize=None)
def _unit_generator(p: int) -> int:
    for g in range(2, p):
        if multiplicative_order(g, p) == p - 1:
            return g
    return 1  # p = 2 is excluded upstream; kept for totality


def unit_group_generator(p: int) -> PrimeFieldElement:
    """Smallest primitive root mod p."""
    _check_odd_prime(p)
    return PrimeFieldElement(_unit_generator(p), p)


def primitive_root_mod_p2(p: int) -> int:
    """Smallest integer generating (Z/p^k)^x for every k >= 1."""
    _check_odd_prime(p)
    for g in range(2, p * p):
        if g % p and multiplicative_order(g, p * p) == p * (p - 1):
            return g
    raise AssertionError("unreachable for odd p")


def sqrt_q(q: int) -> float:
    """The fixed positive square root of q."""
    return math.sqrt(q)


def is_square_mod(a: int, p: int) -> bool:
    a %= p
    return a == 0 or pow(a, (p - 1) // 2, p) == 1


@lru_cache(maxsize=None)
def smallest_nonsquare(p: int) -> int:
    return next(a for a in range(2, p) if not is_square_mod(a, p))


@dataclass(frozen=True, slots=True)
class Fq2:
    """a + b*sqrt(eps) in F_{p^2}, eps the smallest nonsquare."""

    a: int
    b: int
    p: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)

    @property
    def eps(self) -> int:
        return smallest_nonsquare(self.p)

    def __mul__(self, o: Fq2) -> Fq2:
        e = self.eps
        return Fq2(self.a * o.a + e * self.b * o.b, self.a * o.b + self.b * o.a, self.p)

    def __add__(self, o: Fq2) -> Fq2:
        return Fq2(self.a + o.a, self.b + o.b, self.p)

    def norm(self) -> int:
        return (self.a * self.a - self.eps * self.b * self.b) % self.p

    def inverse(self) -> Fq2:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero in F_{p^2}")
        ni = pow(n, -1, self.p)
        return Fq2(self.a * ni, -self.b * ni, self.p)

    def __pow__(self, k: int) -> Fq2:
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Fq2(1, 0, self.p), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def order(self) -> int:
        if self.norm() == 0:
            raise ValueError("zero has no multiplicative order")
        x, k = self, 1
        while not x.is_one():
            x = x * self
            k += 1
        return k


@lru_cache(maxsize=None)
def fq2_generator(p: int) -> Fq2:
    """A generator of F_{p^2}^x, found by scanning in (b, a) order."""
    target = p * p - 1
    for b in range(p):
        for a in range(p):
            x = Fq2(a, b, p)
            if x.norm() and x.order() == target:
                return x
    raise AssertionError("F_{p^2}^x is cyclic")


# ---------------------------------------------------------------------------
# Exact values in Q(zeta_E).


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Integer polynomial division by a monic divisor; coefficients low to high."""
    num = list(num)
    quot = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        quot[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return quot, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(E: int) -> tuple[tuple[int, ...], ...]:
    """Row k = coordinates of zeta_E^k in the power basis mod Phi_E."""
    phi = list(cyclotomic_poly(E))
    deg = len(phi) - 1
    rows = []
    for k in range(E):
        mono = [0] * k + [1]
        if k < deg:
            rows.append(tuple(mono + [0] * (deg - k - 1)))
        else:
            _, rem = _poly_divmod(mono, phi)
            rows.append(tuple(rem))
    return tuple(rows)


class Cyc:
    """An element of Q(zeta_E) in the power basis; equality is exact."""

    __slots__ = ("E", "coeffs")

    def __init__(self, E: int, coeffs: Iterable[Fraction | int]):
        self.E = E
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    @classmethod
    def zero(cls, E: int) -> Cyc:
        return cls(E, [0] * (len(cyclotomic_poly(E)) - 1))

    @classmethod
    def rational(cls, E: int, x: Fraction | int) -> Cyc:
        z = [Fraction(0)] * (len(cyclotomic_poly(E)) - 1)
        z[0] = Fraction(x)
        return cls(E, z)

    @classmethod
    def root(cls, E: int, k: int, coeff: Fraction | int = 1) -> Cyc:
        """coeff * zeta_E^k."""
        row = _power_table(E)[k % E]
        c = Fraction(coeff)
        return cls(E, [c * r for r in row])

    @classmethod
    def from_exponents(cls, E: int, counts: dict[int, Fraction | int] | Iterable[tuple[int, Fraction | int]]) -> Cyc:
        """Sum of c_k * zeta_E^k."""
        table = _power_table(E)
        acc = [Fraction(0)] * (len(cyclotomic_poly(E)) - 1)
        items = counts.items() if isinstance(counts, dict) else counts
        for k, c in items:
            if c:
                for i, r in enumerate(table[k % E]):
                    if r:
                        acc[i] += c * r
        return cls(E, acc)

    def _same(self, other: Cyc) -> None:
        if other.E != self.E:
            raise ValueError("cyclotomic orders differ")

    def __add__(self, other: Cyc) -> Cyc:
        self._same(other)
        return Cyc(self.E, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: Cyc) -> Cyc:
        self._same(other)
        return Cyc(self.E, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> Cyc:
        return Cyc(self.E, [-a for a in self.coeffs])

    def scale(self, c: Fraction | int) -> Cyc:
        c = Fraction(c)
        return Cyc(self.E, [a * c for a in self.coeffs])

    def __mul__(self, other: Cyc | Fraction | int) -> Cyc:
        if not isinstance(other, Cyc):
            return self.scale(other)
        self._same(other)
        prod = [Fraction(0)] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        acc = [Fraction(0)] * len(self.coeffs)
        table = _power_table(self.E)
        for k, c in enumerate(prod):
            if c:
                for i, r in enumerate(table[k % self.E]):
                    if r:
                        acc[i] += c * r
        return Cyc(self.E, acc)

    __rmul__ = __mul__

    def conj(self) -> Cyc:
        """Complex conjugation zeta -> zeta^{-1}."""
        return Cyc.from_exponents(self.E, {(-i) % self.E: c for i, c in enumerate(self.coeffs) if c})

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cyc):
            return NotImplemented
        return self.E == other.E and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.E, self.coeffs))

    def __complex__(self) -> complex:
        z = cmath.exp(2j * math.pi / self.E)
        return complex(sum(float(c) * z**i for i, c in enumerate(self.coeffs) if c))

    def __repr__(self) -> str:
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"Cyc[{self.E}](" + (" + ".join(terms) or "0") + ")"
