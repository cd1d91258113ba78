"""Solubility of a1*x^n + a2*y^n + a3*z^n = 0 over Q_p, over R, and
everywhere-locally.

The Q_p decider works on a p-adically reduced ("minimised") coefficient
triple with two unit entries and a third entry of valuation in [0, n).
Reduction preserves Q_p-solubility, so the verdict only ever depends on
congruence data at a fixed, small modulus:

* for p outside the bad-prime set S(n) the verdict is an n-th power
  residue condition mod p (or automatic, via the Weil bound, when all
  three valuations agree mod n);
* for p in S(n) it is an explicit witness search mod p^(2*v_p(n)+1),
  restricted to witnesses whose first two coordinates are not both
  divisible by p.

S(n) collects the divisors of n together with the primes small enough
that the Weil bound cannot force a point on a smooth plane curve of
degree n, i.e. those with (p+1)/sqrt(p) <= (n-1)(n-2); membership is
tested with the squared integer inequality (p+1)^2 <= ((n-1)(n-2))^2 * p
so there is no floating-point boundary to get wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import FactorTable, factorize, is_nth_power_residue, padic_valuation, primes_up_to

__all__ = [
    "ExponentContext",
    "MinimisedTriple",
    "els",
    "minimise",
    "qp_soluble",
    "qp_soluble_enumerative",
    "r_soluble",
    "small_primes",
]


def small_primes(n: int) -> tuple[int, ...]:
    """The bad primes S(n): divisors of n plus p with (p+1)^2 <= c^2 * p,
    c = (n-1)(n-2).  Candidates are bounded by p < c^2 since (p+1)^2 > p^2."""
    if n < 2:
        raise ValueError(f"exponent must be >= 2, got {n}")
    c = (n - 1) * (n - 2)
    bad = set()
    m = n
    for p in primes_up_to(n):
        if m % p == 0:
            bad.add(p)
            while m % p == 0:
                m //= p
    for p in primes_up_to(c * c):
        if (p + 1) ** 2 <= c * c * p:
            bad.add(p)
    return tuple(sorted(bad))


@dataclass(frozen=True)
class ExponentContext:
    """Immutable per-exponent data: n, the bad primes S(n), and v_p(n)."""

    n: int
    small_primes: tuple[int, ...]
    vp_of_n: tuple[tuple[int, int], ...]  # (p, v_p(n)) for p | n

    @classmethod
    def for_exponent(cls, n: int) -> "ExponentContext":
        bad = small_primes(n)
        vps = []
        m = n
        for p in primes_up_to(n):
            if m % p == 0:
                v = 0
                while m % p == 0:
                    m //= p
                    v += 1
                vps.append((p, v))
        return cls(n=n, small_primes=bad, vp_of_n=tuple(vps))

    def vp_n(self, p: int) -> int:
        for q, v in self.vp_of_n:
            if q == p:
                return v
        return 0

    def is_small(self, p: int) -> bool:
        return p in self.small_primes


@dataclass(frozen=True)
class MinimisedTriple:
    """p-adically reduced triple: b1, b2 units, v_p(b3) in [0, n).

    ``perm`` records which input positions landed in slots (1, 2, 3); the
    reduction multiplies entries by powers of p only, so it preserves
    Q_p-solubility of the diagonal equation.
    """

    b1: int
    b2: int
    b3: int
    perm: tuple[int, int, int]
    vb3: int


def minimise(a: tuple[int, int, int], ctx: ExponentContext, p: int) -> MinimisedTriple:
    """Reduce (a1, a2, a3) to a minimised triple at p.

    Requires at most two distinct valuation classes mod n.  When several
    index pairs share a class the lexicographically smallest pair is taken,
    so the output (hence any memoization key built from it) is canonical.
    """
    n = ctx.n
    if any(x == 0 for x in a):
        raise ValueError("minimise requires all coefficients nonzero")
    vals = []
    units = []
    for x in a:
        v, u = padic_valuation(x, p)
        vals.append(v)
        units.append(u)
    classes = [v % n for v in vals]
    if len(set(classes)) == 3:
        raise ValueError("three distinct valuation classes: triple is insoluble at p")
    pair = None
    for i in range(3):
        for j in range(i + 1, 3):
            if classes[i] == classes[j]:
                pair = (i, j)
                break
        if pair:
            break
    i, j = pair
    k = 3 - i - j
    vb3 = (vals[k] - vals[i]) % n
    # a_k / p^(v_k - vb3) == u_k * p^vb3, also when the exponent is negative
    b3 = units[k] * p**vb3
    return MinimisedTriple(b1=units[i], b2=units[j], b3=b3, perm=(i, j, k), vb3=vb3)


@lru_cache(maxsize=None)
def _nth_power_table(n: int, m: int) -> tuple[int, ...]:
    return tuple(pow(t, n, m) for t in range(m))


@lru_cache(maxsize=None)
def _pair_sums(n: int, p: int, m: int, b1: int, b2: int) -> frozenset[int]:
    """All values of b1*t1^n + b2*t2^n mod m over (t1, t2) with p not
    dividing both.  Shared by every witness search with the same unit pair."""
    powers = _nth_power_table(n, m)
    sums = set()
    for t1 in range(m):
        w1 = b1 * powers[t1]
        t1_div = t1 % p == 0
        for t2 in range(m):
            if t1_div and t2 % p == 0:
                continue
            sums.add((w1 + b2 * powers[t2]) % m)
    return frozenset(sums)


@lru_cache(maxsize=None)
def _wild_soluble(n: int, p: int, vpn: int, b1: int, b2: int, b3: int) -> bool:
    """Witness search mod m = p^(2*vpn+1) for the minimised equation
    b1*t1^n + b2*t2^n + b3*t3^n = 0 with (t1, t2) not both divisible by p."""
    m = p ** (2 * vpn + 1)
    b1 %= m
    b2 %= m
    b3 %= m
    sums = _pair_sums(n, p, m, b1, b2)
    for w in set(_nth_power_table(n, m)):
        if (-b3 * w) % m in sums:
            return True
    return False


def qp_soluble(a: tuple[int, int, int], ctx: ExponentContext, p: int) -> bool:
    """Does a1*x^n + a2*y^n + a3*z^n = 0 have a nonzero Q_p solution?

    Route: three distinct valuation classes mod n -> insoluble; otherwise
    minimise and, for p outside S(n), apply the residue criterion; for
    p in S(n) run the bounded witness search.
    """
    if any(x == 0 for x in a):
        raise ValueError("qp_soluble requires all coefficients nonzero")
    n = ctx.n
    vals = [padic_valuation(x, p)[0] % n for x in a]
    if len(set(vals)) == 3:
        return False
    b = minimise(a, ctx, p)
    if not ctx.is_small(p):
        if b.vb3 == 0:
            # single valuation class: smooth plane curve mod p, point by Weil
            return True
        return is_nth_power_residue((-b.b1 * pow(b.b2, -1, p)) % p, n, p)
    return _wild_soluble(n, p, ctx.vp_n(p), b.b1, b.b2, b.b3)


def qp_soluble_enumerative(a: tuple[int, int, int], ctx: ExponentContext, p: int) -> bool:
    """Q_p verdict by the general witness search at every prime, including
    those where the residue shortcut applies.  Cross-check path only."""
    if any(x == 0 for x in a):
        raise ValueError("qp_soluble_enumerative requires all coefficients nonzero")
    n = ctx.n
    vals = [padic_valuation(x, p)[0] % n for x in a]
    if len(set(vals)) == 3:
        return False
    b = minimise(a, ctx, p)
    return _wild_soluble(n, p, ctx.vp_n(p), b.b1, b.b2, b.b3)


def r_soluble(a: tuple[int, int, int], n: int) -> bool:
    """Real solubility: automatic for odd n; for even n the three signs
    must not all agree."""
    if n % 2 == 1:
        return True
    a1, a2, a3 = a
    return not (a1 > 0 and a2 > 0 and a3 > 0) and not (a1 < 0 and a2 < 0 and a3 < 0)


def els(a: tuple[int, int, int], ctx: ExponentContext, table: FactorTable) -> bool:
    """Everywhere-local solubility of a coprime coefficient triple.

    A triple with a zero coefficient is counted soluble: the projective
    point supported on that coordinate lies on the curve.  Otherwise the
    equation must be soluble over R and over Q_p for p in S(n) and for
    every p dividing a1*a2*a3 (all other primes are automatic).
    """
    a1, a2, a3 = a
    if math.gcd(math.gcd(a1, a2), a3) != 1:
        raise ValueError("els requires gcd(a1, a2, a3) = 1")
    if a1 == 0 or a2 == 0 or a3 == 0:
        return True
    if not r_soluble(a, ctx.n):
        return False
    ps = set(ctx.small_primes)
    for x in a:
        ps.update(factorize(x, table))
    return all(qp_soluble(a, ctx, p) for p in sorted(ps))
