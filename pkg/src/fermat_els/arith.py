"""Exact arithmetic substrate: p-adic valuations, modular power residues,
prime sieves and factor tables, and a deterministic real gamma function.

Everything here is pure and deterministic.  Rational quantities are carried
as ``fractions.Fraction`` (re-exported as ``BigRational``), which already
guarantees lowest terms and a positive denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "BigRational",
    "FactorTable",
    "factorize",
    "gamma_real",
    "is_nth_power_residue",
    "padic_valuation",
    "primes_up_to",
    "rep_mod",
]

BigRational = Fraction


def padic_valuation(x: int, p: int) -> tuple[int, int]:
    """Split x = p^v * u with p not dividing u; returns (v, u).

    The sign of x is carried by the unit part u.  Rejects x = 0 (the
    valuation would be infinite) and p < 2.
    """
    if x == 0:
        raise ValueError("p-adic valuation of 0 is infinite")
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def rep_mod(a: int, n: int) -> int:
    """Representative of a mod n inside {0, ..., n-1}."""
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    return a % n


def is_nth_power_residue(a: int, n: int, p: int) -> bool:
    """Whether the unit a lies in the group of n-th powers of F_p^x.

    The n-th powers form the index-d subgroup of the cyclic group F_p^x,
    d = gcd(n, p-1), so membership is a^((p-1)/d) == 1 mod p.  For p = 2
    the unit group is trivial and every unit is an n-th power.
    """
    if a % p == 0:
        raise ValueError(f"{a} is not a unit mod {p}")
    d = math.gcd(n, p - 1)
    return pow(a % p, (p - 1) // d, p) == 1


# Lanczos approximation, g = 7, 9 hard-coded coefficients.  Gives ~1e-13
# relative accuracy on (0, 30); we only rely on (0, 10].
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_real(x: float) -> float:
    """Gamma(x) for real x > 0 via a fixed-coefficient Lanczos scheme.

    Deterministic and dependency-free; relative error well below 1e-10 on
    [0.1, 10], which covers every exponent this library ever evaluates.
    """
    if x <= 0:
        raise ValueError(f"gamma_real requires x > 0, got {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def primes_up_to(limit: int) -> list[int]:
    """Ascending list of primes <= limit (empty for limit < 2)."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i in range(2, limit + 1) if sieve[i]]


@dataclass(frozen=True)
class FactorTable:
    """Smallest-prime-factor table for 2..limit, immutable once built."""

    limit: int
    smallest_prime_factor: tuple[int, ...]

    @classmethod
    def build(cls, limit: int) -> "FactorTable":
        if limit < 2:
            raise ValueError(f"FactorTable limit must be >= 2, got {limit}")
        spf = list(range(limit + 1))
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == p:  # p prime
                for k in range(p * p, limit + 1, p):
                    if spf[k] == k:
                        spf[k] = p
        return cls(limit=limit, smallest_prime_factor=tuple(spf))


def factorize(x: int, table: FactorTable) -> dict[int, int]:
    """Complete factorization of |x| as {prime: exponent}."""
    if x == 0:
        raise ValueError("cannot factorize 0")
    x = abs(x)
    if x > table.limit:
        raise ValueError(f"{x} exceeds factor table limit {table.limit}")
    spf = table.smallest_prime_factor
    out: dict[int, int] = {}
    while x > 1:
        p = spf[x]
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        out[p] = e
    return out
