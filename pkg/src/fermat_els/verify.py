"""Self-contained cross-check suites wired to `fermat-els verify`.

Every check pits two independent routes against each other (closed form
vs enumeration, residue shortcut vs witness search, Hilbert symbol vs the
general decider, orbit counting vs the unit-sum formula, symmetric vs
direct census).  "quick" stays under a minute; "full" repeats the same
checks at acceptance scale.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

from .arith import gamma_real, is_nth_power_residue, primes_up_to
from .census import census_sweep, count_els_direct, count_els_symmetric, CensusAborted
from .constants import alpha, alpha_orbit_oracle, euler_product
from .densities import delta_p_closed, delta_p_exact
from .hilbert import conic_qp_soluble
from .local import ExponentContext, qp_soluble, qp_soluble_enumerative, small_primes

CheckResult = tuple[str, bool, str]


def _check_alpha_oracle(full: bool) -> tuple[bool, str]:
    top = 24
    bad = [n for n in range(2, top + 1) if alpha(n) != alpha_orbit_oracle(n)]
    return not bad, f"alpha == orbit oracle for n in 2..{top}" if not bad else f"mismatch at {bad}"


def _check_small_primes(full: bool) -> tuple[bool, str]:
    if small_primes(3) != (3,) or small_primes(2) != (2,):
        return False, "S(2) or S(3) wrong"
    if small_primes(4) != (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        return False, "S(4) wrong"
    for n in range(2, 9):
        c = (n - 1) * (n - 2)
        s = set(small_primes(n))
        for p in primes_up_to(10_000):
            int_in = (p + 1) ** 2 <= c * c * p or n % p == 0
            float_in = (p + 1) / math.sqrt(p) <= c or n % p == 0
            if int_in != float_in or int_in != (p in s):
                return False, f"membership mismatch at n={n}, p={p}"
    return True, "integer and float S(n) membership agree for n<=8, p<1e4"


def _check_closed_forms_n3(full: bool) -> tuple[bool, str]:
    ctx = ExponentContext.for_exponent(3)
    for p in primes_up_to(100):
        if p == 3:
            continue
        nd = delta_p_closed(ctx, p).normalized
        if p % 3 == 1:
            ref = Fraction(p * p - p + 1, (p - 1) ** 2)
        else:
            ref = Fraction(
                p**6 + 3 * p**5 + 6 * p**4 + p**3 + 6 * p**2 + 3 * p + 1,
                (p - 1) ** 2 * (p**2 + p + 1) ** 2,
            )
        if nd != ref:
            return False, f"closed form mismatch at p={p}"
    return True, "both closed-form polynomials match for all p < 100"


def _check_method_equivalence(full: bool) -> tuple[bool, str]:
    pairs = [(2, 3), (2, 5), (3, 2), (3, 5)]
    if full:
        pairs.append((3, 7))
    for n, p in pairs:
        ctx = ExponentContext.for_exponent(n)
        if delta_p_exact(ctx, p, method="direct").exact != delta_p_closed(ctx, p).exact:
            return False, f"direct != closed at (n={n}, p={p})"
        if delta_p_exact(ctx, p, method="classed").exact != delta_p_closed(ctx, p).exact:
            return False, f"classed != closed at (n={n}, p={p})"
    ctx4 = ExponentContext.for_exponent(4)
    wild_pairs = [(4, 5)] + ([(4, 7)] if full else [])
    for n, p in wild_pairs:
        a = delta_p_exact(ctx4, p, method="direct", force=True).exact
        b = delta_p_exact(ctx4, p, method="classed").exact
        if a != b:
            return False, f"direct != classed at (n={n}, p={p})"
    return True, f"m-count methods agree on {pairs + wild_pairs}"


def _check_hilbert_oracle(full: bool) -> tuple[bool, str]:
    bound = 20 if full else 10
    ctx = ExponentContext.for_exponent(2)
    checked = 0
    for a1 in range(-bound, bound + 1):
        if a1 == 0:
            continue
        for a2 in range(-bound, bound + 1):
            if a2 == 0:
                continue
            g12 = math.gcd(a1, a2)
            for a3 in range(-bound, bound + 1):
                if a3 == 0 or math.gcd(g12, a3) != 1:
                    continue
                a = (a1, a2, a3)
                for p in (2, 3, 5, 7, 11):
                    checked += 1
                    if qp_soluble(a, ctx, p) != conic_qp_soluble(a, p):
                        return False, f"Hilbert symbol mismatch at a={a}, p={p}"
    return True, f"n=2 decider matches the Hilbert symbol on {checked} checks (|a|<={bound})"


def _check_fast_slow(full: bool) -> tuple[bool, str]:
    cases = 1000 if full else 250
    rng = random.Random(20250810)
    checked = 0
    for n in (2, 3):
        ctx = ExponentContext.for_exponent(n)
        bad = set(ctx.small_primes)
        for p in primes_up_to(31):
            if p in bad:
                continue
            for _ in range(cases):
                a = tuple(
                    rng.choice([1, -1]) * rng.randint(1, 400) * p ** rng.randint(0, 2)
                    for _ in range(3)
                )
                checked += 1
                if qp_soluble(a, ctx, p) != qp_soluble_enumerative(a, ctx, p):
                    return False, f"fast/slow mismatch at n={n}, p={p}, a={a}"
    return True, f"residue shortcut matches forced enumeration on {checked} random triples"


def _check_fast_slow_exhaustive(full: bool) -> tuple[bool, str]:
    if not full:
        return True, "skipped in quick suite (run full)"
    bound = 30
    checked = 0
    for n in (2, 3):
        ctx = ExponentContext.for_exponent(n)
        ps = [p for p in primes_up_to(31) if not ctx.is_small(p)]
        for a1 in range(-bound, bound + 1):
            if a1 == 0:
                continue
            for a2 in range(-bound, bound + 1):
                if a2 == 0:
                    continue
                g12 = math.gcd(a1, a2)
                for a3 in range(-bound, bound + 1):
                    if a3 == 0 or math.gcd(g12, a3) != 1:
                        continue
                    a = (a1, a2, a3)
                    for p in ps:
                        checked += 1
                        if qp_soluble(a, ctx, p) != qp_soluble_enumerative(a, ctx, p):
                            return False, f"fast/slow mismatch at n={n}, p={p}, a={a}"
    return True, f"exhaustive fast/slow agreement on {checked} checks (|a|<={bound}, p<=31)"


def _check_invariances(full: bool) -> tuple[bool, str]:
    cases = 1000 if full else 200
    rng = random.Random(4194304)
    primes = primes_up_to(50)
    checked = 0
    for _ in range(cases):
        n = rng.choice([2, 3, 4, 5])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice(primes)
        a = tuple(
            rng.choice([1, -1]) * rng.randint(1, 50) * p ** rng.randint(0, n)
            for _ in range(3)
        )
        base = qp_soluble(a, ctx, p)
        perm = [0, 1, 2]
        rng.shuffle(perm)
        if qp_soluble(tuple(a[i] for i in perm), ctx, p) != base:
            return False, f"permutation variance at n={n}, p={p}, a={a}"
        u = rng.randint(1, 30)
        while u % p == 0:
            u += 1
        for lam in (-1, p, p * p, u):
            if qp_soluble(tuple(lam * x for x in a), ctx, p) != base:
                return False, f"scaling variance (lambda={lam}) at n={n}, p={p}, a={a}"
        c = rng.randint(1, 20)
        while c % p == 0:
            c += 1
        twisted = list(a)
        twisted[rng.randrange(3)] *= c**n
        if qp_soluble(tuple(twisted), ctx, p) != base:
            return False, f"n-th power twist variance at n={n}, p={p}, a={a}"
        checked += 1
    return True, f"permutation/scaling/twist invariance on {checked} random cases"


def _check_distinct_classes(full: bool) -> tuple[bool, str]:
    rng = random.Random(99)
    for _ in range(300):
        n = rng.choice([2, 3, 4])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice([2, 3, 5, 7, 11])
        e1, e2, e3 = rng.sample(range(n), 3) if n >= 3 else (0, 1, None)
        if n == 2:
            # need three distinct classes mod 2: impossible; use n >= 3 only
            continue
        units = [rng.randint(1, 30) for _ in range(3)]
        units = [u + 1 if u % p == 0 else u for u in units]
        a = (units[0] * p**e1, units[1] * p**e2, units[2] * p**e3)
        if qp_soluble(a, ctx, p):
            return False, f"triple with 3 distinct classes declared soluble: {a}, p={p}, n={n}"
    return True, "triples with three distinct valuation classes are insoluble"


def _check_density_sanity(full: bool) -> tuple[bool, str]:
    for n in (2, 3, 4, 5):
        ctx = ExponentContext.for_exponent(n)
        for p in primes_up_to(60 if full else 30):
            if ctx.is_small(p):
                continue
            d = delta_p_closed(ctx, p)
            if not 0 < d.exact < 1:
                return False, f"density out of (0,1) at n={n}, p={p}"
            if d.normalized * (1 - Fraction(1, p)) ** 3 != d.exact:
                return False, f"normalization broken at n={n}, p={p}"
            if d.normalized <= 1 - Fraction(4 * n, p):
                return False, f"normalized density below sanity envelope at n={n}, p={p}"
    return True, "density range, normalization, and envelope hold"


def _check_residue_enumeration(full: bool) -> tuple[bool, str]:
    top_p, top_n = (100, 12) if full else (40, 8)
    for p in primes_up_to(top_p):
        for n in range(1, top_n + 1):
            powers = {pow(t, n, p) for t in range(1, p)}
            for a in range(1, p):
                if is_nth_power_residue(a, n, p) != (a in powers):
                    return False, f"residue test mismatch at p={p}, n={n}, a={a}"
    return True, f"residue test equals exhaustive power sets for p<={top_p}, n<={top_n}"


def _check_gamma(full: bool) -> tuple[bool, str]:
    for i in range(2, 41):
        x = i / 10
        lhs = gamma_real(x + 1)
        rhs = x * gamma_real(x)
        if abs(lhs - rhs) > 1e-9 * lhs:
            return False, f"recurrence violated at x={x}"
    if abs(gamma_real(0.5) - math.sqrt(math.pi)) > 1e-10:
        return False, "Gamma(1/2) != sqrt(pi)"
    return True, "gamma recurrence on the 0.2..4.0 grid and Gamma(1/2) check"


def _check_census_equivalence(full: bool) -> tuple[bool, str]:
    bs = (10, 20, 30) if full else (10, 20)
    for n in (2, 3):
        ctx = ExponentContext.for_exponent(n)
        for B in bs:
            d = count_els_direct(ctx, B, threads=1)
            s = count_els_symmetric(ctx, B, threads=1)
            if d != s:
                return False, f"strategy mismatch at n={n}, B={B}: {d} != {s}"
    return True, f"symmetric == direct census for n in (2,3), B in {bs}"


def _check_coprime_density(full: bool) -> tuple[bool, str]:
    B = 200
    # Moebius count of coprime triples in [-B, B]^3 vs (2B+1)^3 / zeta(3)
    mu = [0] * (B + 1)
    mu[1] = 1
    primes = primes_up_to(B)
    for d in range(2, B + 1):
        x, m, sqfree = d, 1, True
        for p in primes:
            if p * p > x:
                break
            if x % p == 0:
                x //= p
                if x % p == 0:
                    sqfree = False
                    break
                m = -m
        if not sqfree:
            mu[d] = 0
        else:
            if x > 1:
                m = -m
            mu[d] = m
    total = sum(mu[d] * ((2 * (B // d) + 1) ** 3 - 1) for d in range(1, B + 1))
    zeta3 = 1.2020569031595943
    expected = (2 * B + 1) ** 3 / zeta3
    rel = abs(total - expected) / expected
    return rel < 0.02, f"coprime triple count within {rel:.2%} of box/zeta(3) at B={B}"


def _check_euler_product_stability(full: bool) -> tuple[bool, str]:
    if not full:
        return True, "skipped in quick suite (run full)"
    for n in (2, 3):
        ctx = ExponentContext.for_exponent(n)
        a, _ = euler_product(ctx, 10_000)
        b, _ = euler_product(ctx, 20_000)
        if abs(a - b) >= 0.01:
            return False, f"Euler product unstable for n={n}: {a} vs {b}"
    return True, "Euler product moves < 0.01 from p_max 1e4 to 2e4 for n in (2,3)"


def _check_checkpoint_resume(full: bool) -> tuple[bool, str]:
    import os
    import tempfile

    ctx = ExponentContext.for_exponent(3)
    with tempfile.TemporaryDirectory() as td:
        ckpt = os.path.join(td, "census.json")
        try:
            census_sweep(ctx, [25], p_max=50, checkpoint_path=ckpt, threads=1,
                         abort_after_shards=2)
            return False, "abort seam did not trigger"
        except CensusAborted:
            pass
        resumed = census_sweep(ctx, [25], p_max=50, checkpoint_path=ckpt, threads=1)
        fresh = census_sweep(ctx, [25], p_max=50, threads=1)
        if resumed[0].observed != fresh[0].observed:
            return False, f"resume changed the count: {resumed[0].observed} != {fresh[0].observed}"
    return True, "kill/resume reproduces the identical census count"


_CHECKS = [
    ("alpha-orbit-oracle", _check_alpha_oracle),
    ("small-primes", _check_small_primes),
    ("closed-forms-n3", _check_closed_forms_n3),
    ("method-equivalence", _check_method_equivalence),
    ("hilbert-oracle", _check_hilbert_oracle),
    ("fast-slow-paths", _check_fast_slow),
    ("fast-slow-exhaustive", _check_fast_slow_exhaustive),
    ("qp-invariances", _check_invariances),
    ("distinct-classes-insoluble", _check_distinct_classes),
    ("density-sanity", _check_density_sanity),
    ("residue-enumeration", _check_residue_enumeration),
    ("gamma-identities", _check_gamma),
    ("census-strategies", _check_census_equivalence),
    ("coprime-density", _check_coprime_density),
    ("euler-product-stability", _check_euler_product_stability),
    ("checkpoint-resume", _check_checkpoint_resume),
]


def run_suite(suite: str = "quick") -> list[CheckResult]:
    if suite not in ("quick", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    full = suite == "full"
    results: list[CheckResult] = []
    for name, fn in _CHECKS:
        t0 = time.monotonic()
        try:
            ok, detail = fn(full)
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, f"{detail} [{time.monotonic() - t0:.1f}s]"))
    return results
