"""Exact multivariate polynomial arithmetic over Q."""

from imsetlab.exact_poly.binomial import binomial_groebner, binomial_normal_form, saturate_binomials
from imsetlab.exact_poly.groebner import (
    BudgetExceeded,
    IdealHandle,
    eliminate,
    groebner,
    ideal_contains,
    ideal_equal,
    ideal_membership,
    is_groebner,
    is_reduced,
    normal_form,
    saturate_variable,
)
from imsetlab.exact_poly.hilbert import DimDeg, dim_degree, dim_degree_from_monomials, hilbert_numerator
from imsetlab.exact_poly.polynomial import Polynomial, parse_polynomial
from imsetlab.exact_poly.ring import Ring, RingError

__all__ = [
    "BudgetExceeded", "DimDeg",
    "binomial_groebner", "binomial_normal_form", "saturate_binomials", "IdealHandle", "Polynomial", "Ring", "RingError",
    "dim_degree", "dim_degree_from_monomials", "eliminate", "groebner", "hilbert_numerator",
    "ideal_contains", "ideal_equal", "ideal_membership", "is_groebner", "is_reduced",
    "normal_form", "parse_polynomial", "saturate_variable",
]
