import math
from fractions import Fraction

import pytest

from fermat_els.constants import (
    ConstantReport,
    alpha,
    alpha_orbit_oracle,
    delta_infinity,
    euler_product,
    leading_constant,
)
from fermat_els.local import ExponentContext

CTX2 = ExponentContext.for_exponent(2)
CTX3 = ExponentContext.for_exponent(3)


def test_alpha_examples():
    assert alpha(3) == Fraction(2, 3)
    assert alpha(2) == Fraction(1, 2)
    assert alpha(4) == Fraction(3, 8)
    with pytest.raises(ValueError):
        alpha(1)


def test_alpha_orbit_oracle_agreement():
    for n in range(2, 25):
        assert alpha(n) == alpha_orbit_oracle(n), n


def test_alpha_below_one():
    for n in range(2, 41):
        assert alpha(n) < 1


def test_alpha_prime_closed_form():
    for p in (2, 3, 5, 7, 11):
        assert alpha(p) == Fraction(1, p - 1) * (Fraction(1, p) + (p - 2))


def test_delta_infinity():
    assert delta_infinity(3) == 8
    assert delta_infinity(2) == 6
    assert delta_infinity(5) == 8
    with pytest.raises(ValueError):
        delta_infinity(1)


def test_euler_product_single_factor():
    prod, log = euler_product(CTX3, 2)
    assert log == [(2, prod)]
    assert abs(prod - float(Fraction(295, 196))) < 1e-15


def test_euler_product_empty():
    prod, log = euler_product(CTX3, 1)
    assert prod == 1.0 and log == []


def test_euler_product_deterministic():
    a, _ = euler_product(CTX3, 500)
    b, _ = euler_product(CTX3, 500)
    assert a == b


def test_euler_product_regression_n3():
    # frozen from the first verified run at the default truncation
    prod, log = euler_product(CTX3, 10_000)
    assert len(log) == 1229
    assert abs(prod - 1.7701665252960028) < 1e-9


def test_leading_constant_regression_n3():
    rep = leading_constant(CTX3, 10_000)
    assert abs(rep.C_n - 5.703410564117061) < 1e-9
    assert abs(rep.gamma_alpha - 1.3541179394264005) < 1e-12
    assert abs(8 / rep.gamma_alpha**3 - 3.2219627264) < 1e-9


def test_leading_constant_even_factor():
    rep = leading_constant(CTX2, 200)
    assert rep.C_n > 0 and math.isfinite(rep.C_n)
    # (1 + 1_even) = 2 for n = 2
    assert rep.C_n == 2 * rep.delta_infinity / rep.gamma_alpha**3 * rep.euler_product


def test_recompute_identity_bit_exact():
    for ctx, pmax in ((CTX3, 300), (CTX2, 300)):
        rep = leading_constant(ctx, pmax)
        assert rep.C_n == rep.recompute_cn()


def test_report_json_roundtrip():
    rep = leading_constant(CTX3, 200, include_factors=True)
    d = rep.to_json_dict()
    back = ConstantReport.from_json_dict(d)
    assert back.n == rep.n
    assert back.alpha == Fraction(2, 3)
    assert back.delta_infinity == 8
    assert len(back.factor_log) == len(rep.factor_log)
    # 12-significant-digit serialization keeps the recomputation consistent
    assert abs(back.recompute_cn() - back.C_n) <= 1e-10 * abs(back.C_n)


def test_factor_log_optional():
    rep = leading_constant(CTX3, 100)
    assert rep.factor_log is None
    assert "factor_log" not in rep.to_json_dict()
