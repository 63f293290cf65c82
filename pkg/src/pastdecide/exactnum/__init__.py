"""Exact arithmetic: integer polynomials, real and complex algebraic numbers, ln enclosures."""

from .complex import I, ComplexAlgebraic, complex_ops
from .logs import DyadicInterval, log_interval
from .poly import IntPolynomial, factor_irreducible
from .real import Ordering, RealAlgebraic, alg_arith, alg_compare, isolate_real_roots, root_by_index

__all__ = [
    "ComplexAlgebraic",
    "DyadicInterval",
    "I",
    "IntPolynomial",
    "Ordering",
    "RealAlgebraic",
    "alg_arith",
    "alg_compare",
    "complex_ops",
    "factor_irreducible",
    "isolate_real_roots",
    "log_interval",
    "root_by_index",
]
