"""Integers mod n: factorization, residues and the CRT decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod
from typing import Sequence

from .errors import ModulusMismatchError, NotAUnitError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class RingSpec:
    """A modulus together with its prime-power factorization.

    ``factors`` is ordered by increasing prime.  Instances are normally
    obtained from :func:`factorize`, which is cached.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"modulus must be >= 2, got {self.n}")
        if prod(p**a for p, a in self.factors) != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError("factor list must be strictly increasing")
        for p, a in self.factors:
            if a < 1 or not _is_prime(p):
                raise ValueError(f"bad factor {p}^{a}")

    @property
    def two_part(self) -> int:
        """Exponent of 2 in n."""
        for p, a in self.factors:
            if p == 2:
                return a
        return 0

    @property
    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**a for p, a in self.factors)

    @property
    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    @property
    def is_power_of_two(self) -> bool:
        return self.is_prime_power and self.factors[0][0] == 2

    @property
    def odd_factors(self) -> tuple[tuple[int, int], ...]:
        return tuple((p, a) for p, a in self.factors if p != 2)

    def __str__(self) -> str:
        return " * ".join(f"{p}^{a}" if a > 1 else str(p) for p, a in self.factors)


@lru_cache(maxsize=None)
def factorize(n: int) -> RingSpec:
    """Factor ``n`` by trial division."""
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"modulus must be an integer >= 2, got {n!r}")
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            factors.append((p, a))
        p += 1
    if m > 1:
        factors.append((m, 1))
    return RingSpec(n, tuple(factors))


@dataclass(frozen=True)
class Residue:
    value: int
    spec: RingSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.spec.n)

    @classmethod
    def of(cls, value: int, n: int) -> Residue:
        return cls(value, factorize(n))

    @property
    def modulus(self) -> int:
        return self.spec.n

    def _check(self, other: Residue) -> None:
        if self.spec.n != other.spec.n:
            raise ModulusMismatchError(self.spec.n, other.spec.n)

    def __add__(self, other: Residue) -> Residue:
        self._check(other)
        return Residue(self.value + other.value, self.spec)

    def __sub__(self, other: Residue) -> Residue:
        self._check(other)
        return Residue(self.value - other.value, self.spec)

    def __mul__(self, other: Residue) -> Residue:
        self._check(other)
        return Residue(self.value * other.value, self.spec)

    def __neg__(self) -> Residue:
        return Residue(-self.value, self.spec)

    def is_unit(self) -> bool:
        return gcd(self.value, self.spec.n) == 1

    def inv(self) -> Residue:
        g = gcd(self.value, self.spec.n)
        if g != 1:
            raise NotAUnitError(self.value, self.spec.n, g)
        return Residue(pow(self.value, -1, self.spec.n), self.spec)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} mod {self.spec.n}"


def add(a: Residue, b: Residue) -> Residue:
    return a + b


def sub(a: Residue, b: Residue) -> Residue:
    return a - b


def mul(a: Residue, b: Residue) -> Residue:
    return a * b


def neg(a: Residue) -> Residue:
    return -a


def inv(a: Residue) -> Residue:
    return a.inv()


def crt_split(x: Residue) -> list[Residue]:
    """Project ``x`` onto each prime-power factor of its modulus."""
    return [Residue.of(x.value, q) for q in x.spec.prime_powers]


@lru_cache(maxsize=None)
def _crt_basis(n: int) -> tuple[int, ...]:
    # idempotents e_i with e_i = 1 mod q_i and 0 mod q_j (j != i)
    basis = []
    for q in factorize(n).prime_powers:
        m = n // q
        basis.append(m * pow(m, -1, q) % n)
    return tuple(basis)


def crt_join_values(values: Sequence[int], n: int) -> int:
    return sum(v * e for v, e in zip(values, _crt_basis(n))) % n


def crt_join(parts: Sequence[Residue], spec: RingSpec) -> Residue:
    """Inverse of :func:`crt_split` for the ring described by ``spec``."""
    expected = spec.prime_powers
    if len(parts) != len(expected):
        raise ValueError(f"expected {len(expected)} parts for n={spec.n}, got {len(parts)}")
    for part, q in zip(parts, expected):
        if part.spec.n != q:
            raise ModulusMismatchError(part.spec.n, q)
    return Residue(crt_join_values([p.value for p in parts], spec.n), spec)
