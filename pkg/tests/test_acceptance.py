"""Acceptance criteria 1-10, one test (or parametrised family) per criterion.

Run ``pytest tests/test_acceptance.py`` for a per-criterion PASS/FAIL
summary at the end of the report, or execute this file directly.
"""
import csv
import io
import math
import random
import sys
from fractions import Fraction

import numpy as np
import pytest

from steinext import cli
from steinext.combinatorics import (
    double_factorial,
    falling_factorial,
    gen_factorial_coeff_table,
    hermite_coeff,
    hermite_coeff_table,
    hermite_coeff_table_via_recurrence,
)
from steinext.function_model import (
    Cos,
    Exp,
    Poly,
    RationalPolynomial,
    Sin,
    derivative,
    exact_expectation,
    mgf_product_oracle,
    poly_expectation,
    poly_expectation_product,
)
from steinext.ibd import AveragedShiftConfig, averaged_shift_expectation
from steinext.oracle import monte_carlo_expectation, quadrature_expectation
from steinext.stein_core import (
    GENERAL_MEAN,
    ZERO_MEAN,
    GaussianLaw,
    central_moment,
    evaluate_reduction,
    evaluate_reduction_exact,
    recursive_stein_rewriter,
    reduce_general_mean,
    reduce_zero_mean,
    reduction_stats,
)

criterion = pytest.mark.criterion


def stein_value(f, n, law):
    red = reduce_zero_mean(n) if law.mu == 0 else reduce_general_mean(n)
    avgs = {k: exact_expectation(derivative(f, k), law) for k in red.derivative_orders}
    return evaluate_reduction(red, law, avgs)


# 1 ---------------------------------------------------------------------------


@criterion(1, "H(n+1,k) = (n-2k+2) H(n,k-1) + H(n,k) exactly, n <= 60")
def test_c1_hermite_recurrence():
    for n in range(61):
        for k in range(-1, (n + 1) // 2 + 2):
            lhs = hermite_coeff(n + 1, k)
            rhs = (n - 2 * k + 2) * hermite_coeff(n, k - 1) + hermite_coeff(n, k)
            assert lhs == rhs, (n, k)
    # the table built by the recurrence alone equals the factorial formula
    assert hermite_coeff_table_via_recurrence(61) == hermite_coeff_table(61)


# 2 ---------------------------------------------------------------------------


@criterion(2, "2^(n-k) H(n,k) = C(n,n-k;2) exactly, n <= 60")
def test_c2_lemma2():
    table = gen_factorial_coeff_table(60)
    for n in range(61):
        for k in range(n // 2 + 1):
            assert 2 ** (n - k) * hermite_coeff(n, k) == table(n, n - k), (n, k)


# 3 ---------------------------------------------------------------------------


@criterion(3, "(2m)_n = sum_l C(n,l;2) (m)_l exactly, n <= 20, m <= 40")
def test_c3_falling_factorial_expansion():
    table = gen_factorial_coeff_table(20)
    for n in range(21):
        for m in range(41):
            rhs = sum(table(n, l) * falling_factorial(m, l) for l in range(n + 1))
            assert falling_factorial(2 * m, n) == rhs, (n, m)


# 4 ---------------------------------------------------------------------------


@criterion(4, "closed forms equal the recursive Stein rewriter, n <= 12, both mean cases")
@pytest.mark.parametrize("n", range(13))
def test_c4_closed_form_equals_recursion(n):
    assert reduce_zero_mean(n) == recursive_stein_rewriter(n, ZERO_MEAN)
    assert reduce_general_mean(n) == recursive_stein_rewriter(n, GENERAL_MEAN)


# 5 ---------------------------------------------------------------------------


@criterion(5, "central moments (n-1)!! sigma^n, odd zero, match N=64 quadrature within 1e-12")
@pytest.mark.parametrize("s2", [Fraction(1, 4), Fraction(1), Fraction(4)])
def test_c5_central_moments(s2):
    one = Poly(RationalPolynomial((1,)))
    sigma = math.sqrt(s2)
    for n in range(17):
        value = central_moment(n)(0, s2)
        if n % 2:
            assert value == 0
        else:
            assert value == double_factorial(n - 1) * s2 ** (n // 2)
        quad = quadrature_expectation(one, n, GaussianLaw(0, s2), order=64)
        # odd n: true value 0, measured on the scale sqrt(E[X^(2n)])
        scale = float(value) if n % 2 == 0 else math.sqrt(double_factorial(2 * n - 1)) * sigma**n
        assert abs(quad - float(value)) <= 1e-12 * scale, n


# 6 ---------------------------------------------------------------------------


def _random_polynomials(count=50, seed=20240601):
    rng = random.Random(seed)
    polys = []
    for _ in range(count):
        deg = rng.randint(0, 10)
        coeffs = [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(deg + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = Fraction(1)
        polys.append(RationalPolynomial(tuple(coeffs)))
    return polys


@criterion(6, "50 random rational polynomials, n <= 10: lemma exact = moment expansion, quadrature 1e-10")
@pytest.mark.parametrize(
    "law", [GaussianLaw(0, 1), GaussianLaw(Fraction(-2, 3), Fraction(5, 4))], ids=["zero_mean", "general_mean"]
)
def test_c6_polynomial_triangle(law):
    for p in _random_polynomials():
        for n in range(11):
            red = reduce_zero_mean(n) if law.mu == 0 else reduce_general_mean(n)
            avgs = {k: poly_expectation(p.derivative(k), law) for k in red.derivative_orders}
            exact = evaluate_reduction_exact(red, law, avgs)
            assert exact == poly_expectation_product(p, n, law), (p, n)
            quad = quadrature_expectation(Poly(p), n, law, order=64)
            # E|p(X) X^n| as the scale, so near-cancelling cases are judged fairly
            scale = quadrature_expectation(lambda x: np.abs(p(x) * x**n), 0, law, order=64)
            assert abs(quad - float(exact)) <= 1e-10 * max(abs(float(exact)), scale), (p, n)


# 7 ---------------------------------------------------------------------------


@criterion(7, "E[X^n e^(aX)]: lemma = MGF derivative = quadrature within 1e-9")
@pytest.mark.parametrize("a", [-0.5, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("s2", [0.25, 1.0, 4.0])
def test_c7_exponential_oracle(a, s2):
    law = GaussianLaw(0, s2)
    f = Exp(a)
    for n in range(11):
        lemma = stein_value(f, n, law)
        mgf = mgf_product_oracle(n, a, law)
        quad = quadrature_expectation(f, n, law, order=64)
        assert abs(lemma - mgf) <= 1e-9 * abs(mgf), n
        assert abs(quad - mgf) <= 1e-9 * abs(mgf), n


# 8 ---------------------------------------------------------------------------


@criterion(8, "averaged shift: Exp(1/2) to e^(1/8) within 1e-12 by 30 terms; polynomials stop at ceil(deg/2)")
def test_c8_ibd_convergence():
    res = averaged_shift_expectation(Exp(0.5), GaussianLaw(0, 1), AveragedShiftConfig(max_terms=30))
    target = math.exp(0.125)
    assert res.converged and res.terms_used <= 30
    assert abs(res.value - target) <= 1e-12 * target

    trace = AveragedShiftConfig(keep_trace=True)
    for deg in range(13):
        p = RationalPolynomial(tuple(Fraction(j + 1, 3) for j in range(deg + 1)))
        for law in (GaussianLaw(0, Fraction(1, 2)), GaussianLaw(0, 3)):
            res = averaged_shift_expectation(Poly(p), law, trace)
            last_m = math.ceil(deg / 2)
            assert res.converged
            # indices 0..last_m are summed, and the last one is live for even degree
            assert res.terms_used == last_m + 1
            assert deg % 2 or res.terms[last_m] != 0
            assert res.exact_value == poly_expectation(p, law)


# 9 ---------------------------------------------------------------------------

MC_FUNCTIONS = [
    Poly(RationalPolynomial((1,))),
    Poly(RationalPolynomial((Fraction(1), Fraction(-2), Fraction(0), Fraction(1, 3)))),
    Exp(0.5),
    Sin(1.0),
    Cos(1.0),
]
MC_LAWS = [GaussianLaw(0, 1), GaussianLaw(Fraction(1, 2), Fraction(1, 4))]


@criterion(9, "seeded 10^6-sample Monte Carlo within 4 standard errors; bit-identical reruns")
@pytest.mark.parametrize("law", MC_LAWS, ids=["std", "shifted"])
@pytest.mark.parametrize("f", MC_FUNCTIONS, ids=repr)
def test_c9_monte_carlo(f, law):
    for n in range(4):
        first = monte_carlo_expectation(f, n, law, samples=1_000_000, seed=2024)
        again = monte_carlo_expectation(f, n, law, samples=1_000_000, seed=2024)
        assert first == again
        target = stein_value(f, n, law)
        assert abs(first.estimate - target) <= 4 * first.std_error, (n, first, target)


# 10 --------------------------------------------------------------------------


@criterion(10, "recursive peak term count >= floor(n/2)+1 for n <= 20; stable bench CSV schema")
def test_c10_bench_sanity():
    for n in range(21):
        closed = reduction_stats(n, "closed_form")
        recursive = reduction_stats(n, "recursive")
        assert closed.final_term_count == n // 2 + 1
        assert recursive.final_term_count == n // 2 + 1
        assert recursive.peak_intermediate_term_count >= closed.final_term_count

    out = io.StringIO()
    assert cli.main(["bench", "--n-max", "20", "--repeats", "1", "--format", "csv"], out=out) == 0
    text = out.getvalue()
    assert text.splitlines()[0] == "n,method,wall_time_ns,final_terms,peak_terms,steps"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 40
    by = {(int(r["n"]), r["method"]): r for r in rows}
    for n in range(1, 21):
        closed, rec = by[(n, "closed_form")], by[(n, "recursive")]
        assert int(rec["peak_terms"]) >= int(closed["peak_terms"]) == n // 2 + 1
        assert int(closed["wall_time_ns"]) > 0 and int(rec["wall_time_ns"]) > 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
