"""Textbook Hilbert symbol over Q_p, kept independent of the general
local-solubility machinery so it can serve as an oracle for n = 2.

(a, b)_p = +1 iff z^2 = a*x^2 + b*y^2 has a nontrivial Q_p solution.  The
evaluation is the classical one: strip p-powers off a and b and combine
Legendre symbols (odd p) or the sign characters eps and omega on units
(p = 2).
"""

from __future__ import annotations

from .arith import padic_valuation

__all__ = ["conic_qp_soluble", "hilbert_symbol"]


def _legendre(u: int, p: int) -> int:
    s = pow(u % p, (p - 1) // 2, p)
    return -1 if s == p - 1 else s


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """(a, b)_p for nonzero integers a, b and a prime p."""
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol requires nonzero arguments")
    alpha, u = padic_valuation(a, p)
    beta, v = padic_valuation(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_v = ((v - 1) // 2) % 2
        omega_u = ((u * u - 1) // 8) % 2
        omega_v = ((v * v - 1) // 8) % 2
        exponent = eps_u * eps_v + alpha * omega_v + beta * omega_u
        return -1 if exponent % 2 else 1
    sign = 1
    if (alpha * beta) % 2 and (p - 1) // 2 % 2:
        sign = -sign
    if beta % 2 and _legendre(u, p) == -1:
        sign = -sign
    if alpha % 2 and _legendre(v, p) == -1:
        sign = -sign
    return sign


def conic_qp_soluble(a: tuple[int, int, int], p: int) -> bool:
    """Nontrivial Q_p solubility of a1*x^2 + a2*y^2 + a3*z^2 = 0 via the
    quaternion algebra criterion (-a1*a3, -a2*a3)_p = +1."""
    a1, a2, a3 = a
    if a1 == 0 or a2 == 0 or a3 == 0:
        raise ValueError("conic test requires nonzero coefficients")
    return hilbert_symbol(-a1 * a3, -a2 * a3, p) == 1
