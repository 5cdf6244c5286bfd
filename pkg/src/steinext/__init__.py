"""Closed-form reduction of Gaussian expectations E[g(X) X^n].

The averages of ``g(X) X^n`` are rewritten as finite weighted sums of
derivative averages ``E[g^(l)(X)]`` whose weights are signless Hermite
coefficients, and every such formula is cross-checked against recursive
Stein rewriting, derivative series, quadrature and Monte Carlo.
"""
from .combinatorics import (
    binomial,
    double_factorial,
    factorial,
    falling_factorial,
    gen_factorial_coeff_table,
    gen_factorial_via_stirling,
    hermite_coeff,
    hermite_coeff_table,
    hermite_coeff_table_via_recurrence,
    hermite_polynomial,
    stirling_first,
    stirling_second,
    stirling_tables,
    verify_falling_identity,
)
from .function_model import (
    Cos,
    Exp,
    Poly,
    RationalPolynomial,
    Sin,
    derivative,
    exact_expectation,
    mgf_product_oracle,
    parse_function,
    poly_expectation_product,
)
from .ibd import AveragedShiftConfig, averaged_shift_expectation, ibd_product_expectation
from .oracle import gauss_hermite_rule, monte_carlo_expectation, quadrature_expectation
from .stein_core import (
    GENERAL_MEAN,
    ZERO_MEAN,
    GaussianLaw,
    Reduction,
    ReductionTerm,
    central_moment,
    evaluate_reduction,
    evaluate_reduction_exact,
    raw_moment,
    recursive_stein_rewriter,
    reduce_general_mean,
    reduce_zero_mean,
    reduction_stats,
)

__version__ = "0.1.0"
