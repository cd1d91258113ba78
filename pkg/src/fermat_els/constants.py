"""The exponent alpha_n, the real density, the truncated Euler product of
local densities, and the leading constant of the asymptotic count

    C_n * B^3 * (log B)^(3*alpha_n - 3).

alpha_n is the average of 1/gcd(n, r-1) over units r mod n, computed
exactly; an independent combinatorial oracle recounts it as the fixed-
point frequency of the affine maps x -> r*x + q on Z/nZ.  Everything
upstream of the final float product is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import gamma_real, primes_up_to
from .densities import DensityCache, delta_p
from .local import ExponentContext

__all__ = [
    "ConstantReport",
    "alpha",
    "alpha_orbit_oracle",
    "delta_infinity",
    "euler_product",
    "leading_constant",
]


def alpha(n: int) -> Fraction:
    """(1/phi(n)) * sum over units r mod n of 1/gcd(n, r-1), exactly.

    Note gcd(n, 0) = n, so r = 1 contributes 1/n.
    """
    if n < 2:
        raise ValueError(f"exponent must be >= 2, got {n}")
    total = Fraction(0)
    phi = 0
    for r in range(n):
        if math.gcd(r, n) == 1:
            phi += 1
            total += Fraction(1, math.gcd(n, r - 1))
    return total / phi


def alpha_orbit_oracle(n: int) -> Fraction:
    """Brute-force recount of alpha(n): the fraction of pairs (q, r) in
    Z/n x (Z/n)^x for which x -> r*x + q has a fixed point mod n."""
    if n < 2:
        raise ValueError(f"exponent must be >= 2, got {n}")
    count = 0
    phi = 0
    for r in range(n):
        if math.gcd(r, n) != 1:
            continue
        phi += 1
        for q in range(n):
            if any((r * x + q - x) % n == 0 for x in range(n)):
                count += 1
    return Fraction(count, n * phi)


def delta_infinity(n: int) -> int:
    """Volume of real-soluble sign patterns: 8 for odd n, 6 for even n."""
    if n < 2:
        raise ValueError(f"exponent must be >= 2, got {n}")
    return 8 if n % 2 else 6


def euler_product(
    ctx: ExponentContext,
    p_max: int,
    *,
    cache: DensityCache | None = None,
) -> tuple[float, list[tuple[int, float]]]:
    """prod over p <= p_max of delta_p(n) * (1 - 1/p)^(3*alpha_n - 3).

    Each exact density is converted to the nearest double once; factors
    are multiplied in ascending prime order so the float result is
    deterministic.  p_max < 2 yields the empty product 1.0.
    """
    n = ctx.n
    expo = 3.0 * float(alpha(n)) - 3.0
    product = 1.0
    factor_log: list[tuple[int, float]] = []
    for p in primes_up_to(p_max):
        d = delta_p(ctx, p, "auto", cache=cache)
        factor = float(d.exact) * (1.0 - 1.0 / p) ** expo
        factor_log.append((p, factor))
        product *= factor
    return product, factor_log


@dataclass(frozen=True)
class ConstantReport:
    """Everything that goes into C_n, kept recomputable from the fields."""

    n: int
    alpha: Fraction
    alpha_float: float
    delta_infinity: int
    p_max: int
    euler_product: float
    gamma_alpha: float
    C_n: float
    factor_log: list[tuple[int, float]] | None = None

    def recompute_cn(self) -> float:
        even = 1 if self.n % 2 == 0 else 0
        return (1 + even) * self.delta_infinity / self.gamma_alpha**3 * self.euler_product

    def to_json_dict(self) -> dict:
        out = {
            "n": self.n,
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
            "alpha_float": _f12(self.alpha_float),
            "delta_infinity": self.delta_infinity,
            "p_max": self.p_max,
            "euler_product": _f12(self.euler_product),
            "gamma_alpha": _f12(self.gamma_alpha),
            "C_n": _f12(self.C_n),
        }
        if self.factor_log is not None:
            out["factor_log"] = [[p, _f12(f)] for p, f in self.factor_log]
        return out

    @classmethod
    def from_json_dict(cls, d: dict) -> "ConstantReport":
        num, den = d["alpha"].split("/")
        fl = d.get("factor_log")
        return cls(
            n=d["n"],
            alpha=Fraction(int(num), int(den)),
            alpha_float=d["alpha_float"],
            delta_infinity=d["delta_infinity"],
            p_max=d["p_max"],
            euler_product=d["euler_product"],
            gamma_alpha=d["gamma_alpha"],
            C_n=d["C_n"],
            factor_log=None if fl is None else [(p, f) for p, f in fl],
        )


def _f12(x: float) -> float:
    """Round a float to 12 significant digits for serialization."""
    return float(f"{x:.12g}")


def leading_constant(
    ctx: ExponentContext,
    p_max: int = 10_000,
    *,
    cache: DensityCache | None = None,
    include_factors: bool = False,
) -> ConstantReport:
    """Assemble C_n = (1 + 1_even(n)) * delta_inf / Gamma(alpha_n)^3 * product."""
    n = ctx.n
    a = alpha(n)
    d_inf = delta_infinity(n)
    product, factor_log = euler_product(ctx, p_max, cache=cache)
    g = gamma_real(float(a))
    even = 1 if n % 2 == 0 else 0
    c_n = (1 + even) * d_inf / g**3 * product
    return ConstantReport(
        n=n,
        alpha=a,
        alpha_float=float(a),
        delta_infinity=d_inf,
        p_max=p_max,
        euler_product=product,
        gamma_alpha=g,
        C_n=c_n,
        factor_log=factor_log if include_factors else None,
    )
