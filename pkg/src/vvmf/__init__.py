"""Exact q-expansions, Frobenius families and conformality checks for vector-valued modular forms."""

from .errors import DomainError, RingMismatchError, TruncationError
from .rings import QQ, real_field, rational_function_field
from .series import (PuiseuxSeries, WeightedForm, eisenstein, eta_quotient, j_and_kappa,
                     mod_derivative, pow_frac, substitute)
from .mlde import (ExponentTuple, MonicMlde, ThetaOde, monic_from_exponents, mlde_residual,
                   theta_from_exponents, theta_from_mlde)
from .frobenius import CharacterVectorExpansion, family_solve, frobenius_solve, to_q_expansion
from .conformal import SMatrix, check_conformal, check_quasi_conformal, fusion
from .hypergeom import Rank2Params, dim_M0

__all__ = [
    "DomainError", "RingMismatchError", "TruncationError",
    "QQ", "real_field", "rational_function_field",
    "PuiseuxSeries", "WeightedForm", "eisenstein", "eta_quotient", "j_and_kappa",
    "mod_derivative", "pow_frac", "substitute",
    "ExponentTuple", "MonicMlde", "ThetaOde", "monic_from_exponents", "mlde_residual",
    "theta_from_exponents", "theta_from_mlde",
    "CharacterVectorExpansion", "family_solve", "frobenius_solve", "to_q_expansion",
    "SMatrix", "check_conformal", "check_quasi_conformal", "fusion",
    "Rank2Params", "dim_M0",
]
