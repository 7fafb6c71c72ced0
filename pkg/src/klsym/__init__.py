"""Exact computation and verification of symmetric-power Kloosterman
L-polynomials, their functional-equation constants, and the closed
epsilon-factor formulas they must match."""

from .cyclotomic import CycInt
from .char_sums import (FrobTrace, KloostermanHistogram, gauss_sum,
                        kloosterman_histogram_all, kloosterman_sum,
                        sym_power_trace)
from .epsilon import (GaussNum, constant_c_closed, eps_infinity_assembled,
                      eps_infinity_closed, eps_zero, evans_sign,
                      gauss_sum_quadratic, jacobi_symbol, laumon_constant,
                      legendre, local_constant)
from .errors import (DomainError, IntegrityError, NonRationalError,
                     ResourceLimitError, VerificationError)
from .finite_field import FqTable, build_field
from .local_data import (InfinityDecomposition, Pair, TameLine,
                         ZeroStalkModel, delta_degree, h1c_degree,
                         infinity_decomposition,
                         infinity_invariant_eigenvalues)
from .lseries import (LPolynomial, SumCache, extract_functional_constant,
                      lambda_coefficient, power_sum, purity_check,
                      reconstruct_lpolynomial)

__version__ = "0.1.0"

__all__ = [
    "CycInt", "FrobTrace", "KloostermanHistogram", "gauss_sum",
    "kloosterman_histogram_all", "kloosterman_sum", "sym_power_trace",
    "GaussNum", "constant_c_closed", "eps_infinity_assembled",
    "eps_infinity_closed", "eps_zero", "evans_sign", "gauss_sum_quadratic",
    "jacobi_symbol", "laumon_constant", "legendre", "local_constant",
    "DomainError", "IntegrityError", "NonRationalError",
    "ResourceLimitError", "VerificationError",
    "FqTable", "build_field",
    "InfinityDecomposition", "Pair", "TameLine", "ZeroStalkModel",
    "delta_degree", "h1c_degree", "infinity_decomposition",
    "infinity_invariant_eigenvalues",
    "LPolynomial", "SumCache", "extract_functional_constant",
    "lambda_coefficient", "power_sum", "purity_check",
    "reconstruct_lpolynomial",
]
