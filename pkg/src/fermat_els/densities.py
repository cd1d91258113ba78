"""Exact local densities delta_p(n) of soluble coefficient triples.

Three mutually checking routes:

* ``m_counts_direct``: exact congruence counts m1, m2, m3 of soluble
  residue triples modulo the p-part p^e of n^2 p^n (e = n + 2 v_p(n)),
  stratified by the valuation pattern (units / one positive valuation /
  two equal positive valuations).  Solubility of a class is decided by
  the minimisation-based witness search and memoized on the minimised
  residue triple mod p^(2 v_p(n) + 1), so the count partitions the p^(3e)
  residue space into classes with exact lift multiplicities instead of
  walking it one triple at a time.
* ``m_counts_classed``, for p not dividing n: m2 and m3 from the closed
  residue-class counts (the two-term condition is exactly an n-th power
  residue test), and m1 = p^(3(n-1)) * N_units where N_units is counted
  over the gcd(n, p-1)^2 coset pairs of F_p^x / (F_p^x)^n, each decided
  by a small enumeration.
* ``delta_p_closed``, for p outside S(n): the fully closed rational form.

The density itself comes from the identity

    p^(6 v_p(n) + 3n) * delta_p(n)
        = (1 - p^-3n)/(1 - p^-n)^3 * m1
        + 3 (1 - p^-2n)/(1 - p^-n)^3 * m2
        + 3 /(1 - p^-n)^2 * m3,

with every quantity an exact rational; floats appear only downstream in
the constants module.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction

from .local import ExponentContext, _wild_soluble, qp_soluble

__all__ = [
    "DensityCache",
    "LocalDensity",
    "MCounts",
    "class_solubility_predicate",
    "delta_p",
    "delta_p_closed",
    "delta_p_exact",
    "m_counts_classed",
    "m_counts_direct",
]

DIRECT_BUDGET = 10**9


@dataclass(frozen=True)
class MCounts:
    """Counts of soluble residue triples mod p^e by valuation pattern."""

    p: int
    n: int
    m1: int
    m2: int
    m3: int
    modulus_exponent: int

    def __post_init__(self) -> None:
        p, e = self.p, self.modulus_exponent
        units = p**e - p ** (e - 1)
        if not 0 <= self.m1 <= units**3:
            raise ValueError("m1 exceeds the number of unit triples")
        box = p ** (3 * e)
        if not (0 <= self.m2 <= box and 0 <= self.m3 <= box):
            raise ValueError("m2/m3 exceed the residue box")


@dataclass(frozen=True)
class LocalDensity:
    """delta_p(n) as an exact rational, plus its (1-1/p)^-3 normalisation."""

    p: int
    n: int
    exact: Fraction
    normalized: Fraction
    method: str

    def __post_init__(self) -> None:
        if not 0 < self.exact < 1:
            raise ValueError(f"density out of range: {self.exact}")
        if self.normalized * (1 - Fraction(1, self.p)) ** 3 != self.exact:
            raise ValueError("normalized and exact densities are inconsistent")


def class_solubility_predicate(
    a: tuple[int, int, int], ctx: ExponentContext, p: int
) -> bool:
    """Solubility of a residue-class triple mod p^e, e = n + 2 v_p(n).

    Each residue must have p-adic valuation < n; the canonical integer
    lift then has the same valuation and the Q_p verdict of the lift is
    constant on the class (it only depends on the minimised triple mod
    p^(2 v_p(n) + 1), which the class determines).
    """
    n = ctx.n
    e = n + 2 * ctx.vp_n(p)
    mod = p**e
    lifts = []
    for r in a:
        r %= mod
        if r == 0 or (r % p**n) == 0:
            raise ValueError("residue with valuation >= n has no canonical unit lift")
        lifts.append(r)
    return qp_soluble(tuple(lifts), ctx, p)


def _minimised_soluble(n: int, p: int, vpn: int, b1: int, b2: int, b3: int) -> bool:
    """Witness-search verdict for an already-minimised residue triple."""
    return _wild_soluble(n, p, vpn, b1, b2, b3)


def m_counts_direct(
    ctx: ExponentContext, p: int, *, force: bool = False, budget: int = DIRECT_BUDGET
) -> MCounts:
    """Exact m1, m2, m3 by direct enumeration of the residue space.

    The p^(3e) residue box is partitioned by valuation pattern and by the
    minimised residue triple mod q = p^(2 v_p(n) + 1); each class carries
    an exact lift multiplicity (a coordinate of valuation v has p^(n-1-v)
    unit lifts per unit class mod q).  Refuses when p^(3e) exceeds the
    budget unless forced; the classed strategy covers those primes.
    """
    n = ctx.n
    vpn = ctx.vp_n(p)
    e = n + 2 * vpn
    if p ** (3 * e) > budget and not force:
        raise ValueError(
            f"direct enumeration over p^(3e) = {p}^{3 * e} exceeds the budget; "
            "pass force=True or use the classed strategy"
        )
    q = p ** (2 * vpn + 1)
    units = [u for u in range(1, q) if u % p]
    ppow = [pow(p, t, q) for t in range(n + 1)]
    memo: dict[tuple[int, int, int], bool] = {}

    def soluble(b1: int, b2: int, b3: int) -> bool:
        key = (b1, b2, b3)
        r = memo.get(key)
        if r is None:
            r = memo[key] = _minimised_soluble(n, p, vpn, b1, b2, b3)
        return r

    # pattern (0, 0, 0): the triple is already minimised
    lift0 = p ** (n - 1)
    n_sol = 0
    for c1 in units:
        for c2 in units:
            for c3 in units:
                if soluble(c1, c2, c3):
                    n_sol += 1
    m1 = lift0**3 * n_sol

    # pattern (v, 0, 0), 0 < v < n: minimised triple is (a2, a3, p^v u1)
    m2 = 0
    for v in range(1, n):
        liftv = p ** (n - 1 - v)
        n_sol = 0
        for c1 in units:
            b3 = (ppow[v] * c1) % q
            for c2 in units:
                for c3 in units:
                    if soluble(c2, c3, b3):
                        n_sol += 1
        m2 += liftv * lift0**2 * n_sol

    # pattern (l, l, 0), 0 < l < n: minimised triple is (u1, u2, p^(n-l) a3)
    m3 = 0
    for ell in range(1, n):
        liftl = p ** (n - 1 - ell)
        n_sol = 0
        for c3 in units:
            b3 = (ppow[n - ell] * c3) % q
            for c1 in units:
                for c2 in units:
                    if soluble(c1, c2, b3):
                        n_sol += 1
        m3 += liftl**2 * lift0 * n_sol

    return MCounts(p=p, n=n, m1=m1, m2=m2, m3=m3, modulus_exponent=e)


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ArithmeticError(f"expected an integer, got {x}")
    return x.numerator


def m_counts_classed(ctx: ExponentContext, p: int) -> MCounts:
    """m-counts for p not dividing n via residue-class counting.

    m2 and m3 reduce to an n-th power residue condition mod p, giving the
    closed counts; m1 counts unit triples mod p with a nonzero point on
    the reduced curve, grouped by the coset pair of (a2/a1, a3/a1) in
    F_p^x / (F_p^x)^n.
    """
    n = ctx.n
    if p == 0 or n % p == 0:
        raise ValueError(f"classed strategy requires p not dividing n, got p={p}")
    d = math.gcd(n, p - 1)
    P = p**n
    q = Fraction(1, p)

    m2 = _as_int(Fraction(P**3, d) * (1 - q) ** 2 * (q - q**n))
    m3 = _as_int(Fraction(P**3, d) * (1 - q) ** 3 * (q**2 - q ** (2 * n)) / (1 - q**2))

    powers = {pow(t, n, p) for t in range(p)}  # includes 0
    unit_powers = sorted(powers - {0})
    # coset representatives of F_p^x modulo the n-th powers
    reps = []
    seen = set()
    for u in range(1, p):
        if u not in seen:
            reps.append(u)
            seen.update((u * s) % p for s in unit_powers)
    assert len(reps) == d

    def pair_soluble(x: int, y: int) -> bool:
        # nonzero point on t1^n + x t2^n + y t3^n = 0 over F_p
        for w2 in powers:
            for w3 in powers:
                if w2 == 0 and w3 == 0:
                    continue
                if (-(x * w2 + y * w3)) % p in powers:
                    return True
        return False

    soluble_pairs = sum(pair_soluble(x, y) for x in reps for y in reps)
    class_size = (p - 1) ** 3 // (d * d)
    m1 = p ** (3 * (n - 1)) * class_size * soluble_pairs

    return MCounts(p=p, n=n, m1=m1, m2=m2, m3=m3, modulus_exponent=n)


def _density_from_counts(ctx: ExponentContext, p: int, counts: MCounts, method: str) -> LocalDensity:
    n = ctx.n
    q = Fraction(1, p)
    scale = Fraction(1, p ** (3 * counts.modulus_exponent))
    exact = (
        (1 - q ** (3 * n)) / (1 - q**n) ** 3 * counts.m1
        + 3 * (1 - q ** (2 * n)) / (1 - q**n) ** 3 * counts.m2
        + 3 / (1 - q**n) ** 2 * counts.m3
    ) * scale
    normalized = exact / (1 - q) ** 3
    return LocalDensity(p=p, n=n, exact=exact, normalized=normalized, method=method)


def delta_p_exact(
    ctx: ExponentContext,
    p: int,
    *,
    method: str | None = None,
    force: bool = False,
    budget: int = DIRECT_BUDGET,
) -> LocalDensity:
    """delta_p(n) from m-counts (direct enumeration or classed counting)."""
    if method is None:
        method = "direct" if ctx.n % p == 0 else "classed"
    if method == "direct":
        counts = m_counts_direct(ctx, p, force=force, budget=budget)
    elif method == "classed":
        counts = m_counts_classed(ctx, p)
    else:
        raise ValueError(f"unknown m-count method {method!r}")
    return _density_from_counts(ctx, p, counts, method)


def delta_p_closed(ctx: ExponentContext, p: int) -> LocalDensity:
    """Closed rational form of delta_p(n), valid for p outside S(n)."""
    n = ctx.n
    if ctx.is_small(p):
        raise ValueError(f"closed form requires p outside S({n}), got {p}")
    d = math.gcd(n, p - 1)
    q = Fraction(1, p)
    normalized = (
        (1 - q ** (3 * n)) / (1 - q**n) ** 3
        + 3 * (1 - q ** (2 * n)) * (q - q**n) / (d * (1 - q) * (1 - q**n) ** 3)
        + 3 * (q**2 - q ** (2 * n)) / (d * (1 - q**n) ** 2 * (1 - q**2))
    )
    exact = normalized * (1 - q) ** 3
    return LocalDensity(p=p, n=n, exact=exact, normalized=normalized, method="closed")


def delta_p(
    ctx: ExponentContext,
    p: int,
    strategy: str = "auto",
    *,
    cache: "DensityCache | None" = None,
    force: bool = False,
) -> LocalDensity:
    """Dispatch to the cheapest valid method: closed outside S(n), classed
    for bad primes not dividing n, direct for p | n."""
    if strategy == "auto":
        if not ctx.is_small(p):
            strategy = "closed"
        elif ctx.n % p != 0:
            strategy = "classed"
        else:
            strategy = "direct"
    if cache is not None:
        hit = cache.get(ctx.n, p, strategy)
        if hit is not None:
            return hit
    if strategy == "closed":
        out = delta_p_closed(ctx, p)
    elif strategy in ("classed", "direct"):
        out = delta_p_exact(ctx, p, method=strategy, force=force)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if cache is not None:
        cache.put(out)
    return out


class DensityCache:
    """Append-only JSON-lines cache of exact densities.

    One record per line: {"n", "p", "method", "exact_num", "exact_den"}.
    Appends go straight to the file; full rewrites (compaction) replace
    it atomically via a temp file and os.replace.
    """

    def __init__(self, path: str):
        self.path = path
        self._records: dict[tuple[int, int, str], Fraction] = {}
        self._load()

    def _load(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = (rec["n"], rec["p"], rec["method"])
                self._records[key] = Fraction(rec["exact_num"], rec["exact_den"])

    def get(self, n: int, p: int, method: str) -> LocalDensity | None:
        exact = self._records.get((n, p, method))
        if exact is None:
            return None
        normalized = exact / (1 - Fraction(1, p)) ** 3
        return LocalDensity(p=p, n=n, exact=exact, normalized=normalized, method=method)

    def put(self, density: LocalDensity) -> None:
        key = (density.n, density.p, density.method)
        if key in self._records:
            return
        self._records[key] = density.exact
        rec = {
            "n": density.n,
            "p": density.p,
            "method": density.method,
            "exact_num": density.exact.numerator,
            "exact_den": density.exact.denominator,
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def rewrite(self) -> None:
        """Compact the file, replacing it atomically."""
        dir_ = os.path.dirname(os.path.abspath(self.path))
        fd, tmp = tempfile.mkstemp(dir=dir_, suffix=".jsonl.tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                for (n, p, method), exact in sorted(self._records.items()):
                    rec = {
                        "n": n,
                        "p": p,
                        "method": method,
                        "exact_num": exact.numerator,
                        "exact_den": exact.denominator,
                    }
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
