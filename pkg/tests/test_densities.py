import json
import os
from fractions import Fraction

import pytest

from fermat_els.densities import (
    DensityCache,
    LocalDensity,
    MCounts,
    class_solubility_predicate,
    delta_p,
    delta_p_closed,
    delta_p_exact,
    m_counts_classed,
    m_counts_direct,
)
from fermat_els.local import ExponentContext

CTX2 = ExponentContext.for_exponent(2)
CTX3 = ExponentContext.for_exponent(3)
CTX4 = ExponentContext.for_exponent(4)


def test_class_predicate_examples():
    assert class_solubility_predicate((1, 1, 1), CTX3, 3) is True
    assert class_solubility_predicate((1, 2, 7), CTX3, 7) is False
    with pytest.raises(ValueError):
        class_solubility_predicate((1, 1, 27), CTX3, 3)  # valuation 3 >= n
    with pytest.raises(ValueError):
        class_solubility_predicate((1, 1, 0), CTX3, 3)


def test_class_predicate_constant_on_classes():
    # adding multiples of p^e to any coordinate cannot change the verdict
    e = 3 + 2 * 1
    mod = 3**e
    for trip in [(1, 1, 1), (1, 2, 3), (4, 9, 2), (3, 5, 7), (9, 2, 5)]:
        base = class_solubility_predicate(trip, CTX3, 3)
        for k in (1, 2, 7):
            shifted = tuple((x + k * mod) % mod or mod for x in trip)
            assert class_solubility_predicate(shifted, CTX3, 3) == base


def test_m_counts_direct_wild_prime_regression():
    # n=3, p=3 enumeration; verified independently by a raw witness-search
    # enumeration and by depth-bounded primitive-solution sampling
    mc = m_counts_direct(CTX3, 3)
    assert mc.modulus_exponent == 5
    assert mc.m1 == 3306744
    assert Fraction(mc.m1, 3**15) == Fraction(56, 243)
    assert mc.m2 == 1574640
    assert Fraction(mc.m2, 3**15) == Fraction(80, 729)
    assert mc.m3 == 209952
    assert Fraction(mc.m3, 3**15) == Fraction(32, 2187)
    d = delta_p_exact(CTX3, 3, method="direct")
    assert d.exact == Fraction(27662, 41067)


def test_m_counts_bounds_n2_p2():
    mc = m_counts_direct(CTX2, 2)
    assert mc.modulus_exponent == 4
    assert mc.m1 <= (2**4 - 2**3) ** 3 == 512
    assert mc.m2 <= 2**12 and mc.m3 <= 2**12


def test_mcounts_validation():
    with pytest.raises(ValueError):
        MCounts(p=2, n=2, m1=513, m2=0, m3=0, modulus_exponent=4)
    with pytest.raises(ValueError):
        MCounts(p=2, n=2, m1=0, m2=2**12 + 1, m3=0, modulus_exponent=4)


def test_m_counts_direct_budget_guard():
    with pytest.raises(ValueError):
        m_counts_direct(CTX4, 7)  # 7^12 > 1e9
    mc = m_counts_direct(CTX4, 7, force=True)
    assert mc == m_counts_classed(CTX4, 7)


def test_m_counts_classed_rejects_p_dividing_n():
    with pytest.raises(ValueError):
        m_counts_classed(CTX3, 3)


def test_m_counts_classed_formula_value():
    mc = m_counts_classed(CTX4, 5)
    expected_m2 = Fraction(5**12) * Fraction(4, 5) ** 2 * (Fraction(1, 5) - Fraction(1, 5**4)) / 4
    assert mc.m2 == expected_m2


def test_cross_method_exact_equalities():
    for ctx, p in [(CTX2, 3), (CTX2, 5), (CTX3, 2), (CTX3, 5), (CTX3, 7)]:
        direct = delta_p_exact(ctx, p, method="direct").exact
        classed = delta_p_exact(ctx, p, method="classed").exact
        closed = delta_p_closed(ctx, p).exact
        assert direct == classed == closed, (ctx.n, p)
    for p in (5, 7):
        a = delta_p_exact(CTX4, p, method="direct", force=True).exact
        b = delta_p_exact(CTX4, p, method="classed").exact
        assert a == b, p


def test_closed_form_values():
    assert delta_p_closed(CTX3, 7).normalized == Fraction(43, 36)
    assert delta_p_closed(CTX3, 2).normalized == Fraction(295, 49)
    assert delta_p_closed(CTX3, 7).exact == Fraction(258, 343)
    with pytest.raises(ValueError):
        delta_p_closed(CTX3, 3)
    with pytest.raises(ValueError):
        delta_p_closed(CTX4, 31)  # 31 is in S(4)


def test_closed_form_polynomials_n3():
    from fermat_els.arith import primes_up_to

    for p in primes_up_to(100):
        if p == 3:
            continue
        nd = delta_p_closed(CTX3, p).normalized
        if p % 3 == 1:
            assert nd == Fraction(p * p - p + 1, (p - 1) ** 2), p
        else:
            assert nd == Fraction(
                p**6 + 3 * p**5 + 6 * p**4 + p**3 + 6 * p**2 + 3 * p + 1,
                (p - 1) ** 2 * (p**2 + p + 1) ** 2,
            ), p


def test_dispatcher_routes():
    assert delta_p(CTX3, 3).method == "direct"
    assert delta_p(CTX3, 5).method == "closed"
    assert delta_p(CTX4, 31).method == "classed"
    with pytest.raises(ValueError):
        delta_p(CTX3, 3, "closed")
    with pytest.raises(ValueError):
        delta_p(CTX3, 3, "classed")
    with pytest.raises(ValueError):
        delta_p(CTX3, 5, "bogus")


def test_density_range_and_reconstruction():
    from fermat_els.arith import primes_up_to

    for ctx in (CTX2, CTX3, CTX4):
        for p in primes_up_to(40):
            strategy = "auto"
            d = delta_p(ctx, p, strategy)
            assert 0 < d.exact < 1
            assert d.normalized * (1 - Fraction(1, p)) ** 3 == d.exact
            if not ctx.is_small(p):
                assert d.normalized > 1 - Fraction(4 * ctx.n, p)


def test_local_density_validation():
    with pytest.raises(ValueError):
        LocalDensity(p=5, n=3, exact=Fraction(3, 2), normalized=Fraction(1), method="x")
    with pytest.raises(ValueError):
        LocalDensity(p=5, n=3, exact=Fraction(1, 2), normalized=Fraction(1, 2), method="x")


def test_density_cache_roundtrip(tmp_path):
    path = str(tmp_path / "densities.jsonl")
    cache = DensityCache(path)
    assert cache.get(3, 7, "closed") is None
    d = delta_p(CTX3, 7, cache=cache)
    assert d.method == "closed"
    # second instance reads the record back from disk
    cache2 = DensityCache(path)
    hit = cache2.get(3, 7, "closed")
    assert hit is not None and hit.exact == Fraction(258, 343)
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    assert lines == [
        {"exact_den": 343, "exact_num": 258, "method": "closed", "n": 3, "p": 7}
    ]


def test_density_cache_append_and_rewrite(tmp_path):
    path = str(tmp_path / "densities.jsonl")
    cache = DensityCache(path)
    for p in (2, 5, 7):
        delta_p(CTX3, p, cache=cache)
    delta_p(CTX3, 7, cache=cache)  # duplicate: no new line
    with open(path, encoding="utf-8") as fh:
        assert len(fh.readlines()) == 3
    cache.rewrite()
    cache3 = DensityCache(path)
    for p in (2, 5, 7):
        assert cache3.get(3, p, "closed").exact == delta_p_closed(CTX3, p).exact
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]


def test_dispatcher_uses_cache(tmp_path):
    path = str(tmp_path / "densities.jsonl")
    cache = DensityCache(path)
    first = delta_p(CTX3, 13, cache=cache)
    # poison the in-memory store to prove the second call is a cache hit
    cache._records[(3, 13, "closed")] = Fraction(1, 2)
    second = delta_p(CTX3, 13, cache=cache)
    assert second.exact == Fraction(1, 2) != first.exact
