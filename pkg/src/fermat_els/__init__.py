"""Local and everywhere-local solubility of a1*x^n + a2*y^n + a3*z^n = 0,
exact local densities, the leading constant of the asymptotic ELS count,
and an exhaustive census to compare against it."""

from .arith import (
    BigRational,
    FactorTable,
    factorize,
    gamma_real,
    is_nth_power_residue,
    padic_valuation,
    primes_up_to,
    rep_mod,
)
from .census import (
    CensusRow,
    census_sweep,
    count_els_direct,
    count_els_symmetric,
    write_census_csv,
)
from .constants import (
    ConstantReport,
    alpha,
    alpha_orbit_oracle,
    delta_infinity,
    euler_product,
    leading_constant,
)
from .densities import (
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
from .hilbert import conic_qp_soluble, hilbert_symbol
from .local import (
    ExponentContext,
    MinimisedTriple,
    els,
    minimise,
    qp_soluble,
    qp_soluble_enumerative,
    r_soluble,
    small_primes,
)

__version__ = "0.1.0"

__all__ = [
    "BigRational",
    "CensusRow",
    "ConstantReport",
    "DensityCache",
    "ExponentContext",
    "FactorTable",
    "LocalDensity",
    "MCounts",
    "MinimisedTriple",
    "alpha",
    "alpha_orbit_oracle",
    "census_sweep",
    "class_solubility_predicate",
    "conic_qp_soluble",
    "count_els_direct",
    "count_els_symmetric",
    "delta_infinity",
    "delta_p",
    "delta_p_closed",
    "delta_p_exact",
    "els",
    "euler_product",
    "factorize",
    "gamma_real",
    "hilbert_symbol",
    "is_nth_power_residue",
    "leading_constant",
    "m_counts_classed",
    "m_counts_direct",
    "minimise",
    "padic_valuation",
    "primes_up_to",
    "qp_soluble",
    "qp_soluble_enumerative",
    "r_soluble",
    "rep_mod",
    "small_primes",
    "write_census_csv",
]
