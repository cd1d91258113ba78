import math
import random

import pytest

from fermat_els.arith import FactorTable, primes_up_to
from fermat_els.hilbert import conic_qp_soluble
from fermat_els.local import (
    ExponentContext,
    els,
    minimise,
    qp_soluble,
    qp_soluble_enumerative,
    r_soluble,
    small_primes,
)

CTX2 = ExponentContext.for_exponent(2)
CTX3 = ExponentContext.for_exponent(3)


def test_small_primes_examples():
    assert small_primes(3) == (3,)
    assert small_primes(2) == (2,)
    assert small_primes(4) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
    with pytest.raises(ValueError):
        small_primes(1)


def test_small_primes_integer_vs_float():
    for n in range(2, 9):
        c = (n - 1) * (n - 2)
        s = set(small_primes(n))
        for p in primes_up_to(10_000):
            int_member = n % p == 0 or (p + 1) ** 2 <= c * c * p
            float_member = n % p == 0 or (p + 1) / math.sqrt(p) <= c
            assert int_member == float_member
            assert (p in s) == int_member


def test_context_fields():
    ctx = ExponentContext.for_exponent(12)
    assert ctx.vp_n(2) == 2 and ctx.vp_n(3) == 1 and ctx.vp_n(5) == 0
    prod = 1
    for p, v in ctx.vp_of_n:
        prod *= p**v
    assert prod == 12


def test_minimise_examples():
    b = minimise((2, 3, 35), CTX3, 7)
    assert (b.b1, b.b2, b.b3) == (2, 3, 35)
    assert b.vb3 == 1
    with pytest.raises(ValueError):
        minimise((2, 21, 245), CTX3, 7)  # valuation classes {0,1,2}
    for u in (1, 3, 5):
        b = minimise((7**3 * u, 1, 1), CTX3, 7)
        assert b.vb3 == 0
        assert sorted((abs(b.b1), abs(b.b2))) in ([1, 1], [1, u])
        assert b.b1 % 7 and b.b2 % 7


def test_minimise_invariants_random():
    rng = random.Random(12)
    for _ in range(500):
        n = rng.choice([2, 3, 4, 5])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice([2, 3, 5, 7])
        a = tuple(
            rng.choice([1, -1]) * rng.randint(1, 40) * p ** rng.randint(0, 2 * n)
            for _ in range(3)
        )
        vals = []
        for x in a:
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            vals.append(v % n)
        if len(set(vals)) == 3:
            with pytest.raises(ValueError):
                minimise(a, ctx, p)
            continue
        b = minimise(a, ctx, p)
        assert b.b1 % p and b.b2 % p
        v3 = 0
        x = b.b3
        while x % p == 0:
            x //= p
            v3 += 1
        assert v3 == b.vb3 and 0 <= b.vb3 < n
        assert sorted(b.perm) == [0, 1, 2]


def test_qp_soluble_examples():
    assert qp_soluble((1, 1, 1), CTX2, 2) is False
    assert qp_soluble((1, 1, 1), CTX2, 3) is True
    assert qp_soluble((1, 2, 7), CTX3, 7) is False
    assert qp_soluble((1, 1, 7), CTX3, 7) is True
    with pytest.raises(ValueError):
        qp_soluble((0, 1, 1), CTX3, 7)


def test_r_soluble():
    assert r_soluble((1, 1, 1), 3) is True
    assert r_soluble((1, 1, 1), 2) is False
    assert r_soluble((1, 1, -1), 2) is True
    assert r_soluble((-2, -3, -4), 2) is False
    assert r_soluble((-2, -3, -4), 5) is True


def test_els_examples():
    t = FactorTable.build(100)
    assert els((1, 1, -1), CTX2, t) is True  # (3,4,5)
    assert els((1, 1, -3), CTX2, t) is False  # -1 is not a square mod 3
    assert els((1, 1, 1), CTX3, t) is True  # (1,-1,0)
    assert els((1, 1, 0), CTX2, t) is True  # point (0:0:1)
    assert els((0, 0, 1), CTX3, t) is True  # point (1:0:0)
    with pytest.raises(ValueError):
        els((2, 4, 6), CTX3, t)


def test_qp_permutation_invariance():
    rng = random.Random(777)
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    for _ in range(1000):
        n = rng.choice([2, 3, 4, 5])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
        a = tuple(
            rng.choice([1, -1]) * rng.randint(1, 30) * p ** rng.randint(0, n)
            for _ in range(3)
        )
        verdicts = {qp_soluble(tuple(a[i] for i in perm), ctx, p) for perm in perms}
        assert len(verdicts) == 1, (a, n, p)


def test_qp_scaling_invariance():
    rng = random.Random(778)
    for _ in range(1000):
        n = rng.choice([2, 3, 4, 5])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice([2, 3, 5, 7, 11, 13])
        a = tuple(
            rng.choice([1, -1]) * rng.randint(1, 30) * p ** rng.randint(0, n)
            for _ in range(3)
        )
        base = qp_soluble(a, ctx, p)
        u = rng.randint(1, 25)
        while u % p == 0:
            u += 1
        for lam in (-1, p, p * p, u):
            assert qp_soluble(tuple(lam * x for x in a), ctx, p) == base, (a, lam, n, p)


def test_qp_nth_power_twist_invariance():
    rng = random.Random(779)
    for _ in range(1000):
        n = rng.choice([2, 3, 4, 5])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice([2, 3, 5, 7, 11, 13])
        a = list(
            rng.choice([1, -1]) * rng.randint(1, 30) * p ** rng.randint(0, n)
            for _ in range(3)
        )
        base = qp_soluble(tuple(a), ctx, p)
        c = rng.randint(1, 15)
        while c % p == 0:
            c += 1
        i = rng.randrange(3)
        a[i] *= c**n
        assert qp_soluble(tuple(a), ctx, p) == base, (a, c, n, p)


def test_distinct_classes_insoluble():
    rng = random.Random(780)
    for _ in range(500):
        n = rng.choice([3, 4, 5])
        ctx = ExponentContext.for_exponent(n)
        p = rng.choice([2, 3, 5, 7, 11])
        exps = rng.sample(range(n), 3)
        a = []
        for e in exps:
            u = rng.randint(1, 30)
            while u % p == 0:
                u += 1
            a.append(rng.choice([1, -1]) * u * p**e)
        assert qp_soluble(tuple(a), ctx, p) is False


def test_fast_slow_agreement_exhaustive_small():
    # residue shortcut vs forced witness search on all coprime triples
    for n in (2, 3):
        ctx = ExponentContext.for_exponent(n)
        bad = set(ctx.small_primes)
        ps = [p for p in primes_up_to(13) if p not in bad]
        for a1 in range(-8, 9):
            if a1 == 0:
                continue
            for a2 in range(-8, 9):
                if a2 == 0:
                    continue
                for a3 in range(-8, 9):
                    if a3 == 0 or math.gcd(math.gcd(a1, a2), a3) != 1:
                        continue
                    for p in ps:
                        a = (a1, a2, a3)
                        assert qp_soluble(a, ctx, p) == qp_soluble_enumerative(a, ctx, p)


def test_hilbert_oracle_small():
    for a1 in range(-12, 13):
        if a1 == 0:
            continue
        for a2 in range(-12, 13):
            if a2 == 0:
                continue
            g12 = math.gcd(a1, a2)
            for a3 in range(-12, 13):
                if a3 == 0 or math.gcd(g12, a3) != 1:
                    continue
                for p in (2, 3, 5, 7, 11):
                    a = (a1, a2, a3)
                    assert qp_soluble(a, CTX2, p) == conic_qp_soluble(a, p), (a, p)
