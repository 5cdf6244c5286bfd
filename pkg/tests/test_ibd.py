import math
import random
from fractions import Fraction

import pytest

from steinext.function_model import (
    Cos,
    Exp,
    Poly,
    RationalPolynomial,
    Sin,
    derivative,
    exact_expectation,
    iter_catalog,
    poly_expectation,
    poly_expectation_product,
)
from steinext.ibd import (
    AveragedShiftConfig,
    averaged_shift_expectation,
    ibd_product_expectation,
)
from steinext.stein_core import (
    GaussianLaw,
    evaluate_reduction,
    reduce_general_mean,
    reduce_zero_mean,
)

RP = RationalPolynomial
TRACE = AveragedShiftConfig(keep_trace=True)


def test_config_validation():
    with pytest.raises(ValueError):
        AveragedShiftConfig(max_terms=0)
    with pytest.raises(ValueError):
        AveragedShiftConfig(rel_tolerance=0.0)
    with pytest.raises(ValueError):
        AveragedShiftConfig(consecutive_small=0)


def test_constant_function():
    res = averaged_shift_expectation(Poly(RP((1,))), GaussianLaw(0, 1))
    assert (res.value, res.terms_used, res.converged) == (1.0, 1, True)


def test_square_stops_at_m1():
    s2 = Fraction(3, 2)
    res = averaged_shift_expectation(Poly(RP.monomial(2)), GaussianLaw(0, s2), TRACE)
    assert res.terms_used == 2 and res.converged
    assert res.terms == (0.0, 1.5)  # m = 1 term is sigma2/2 * 2
    assert res.exact_value == s2


def test_exp_half_reaches_closed_form():
    res = averaged_shift_expectation(Exp(0.5), GaussianLaw(0, 1), AveragedShiftConfig(max_terms=30))
    assert res.converged
    assert res.terms_used <= 30
    assert abs(res.value - math.exp(0.125)) <= 1e-12 * math.exp(0.125)


@pytest.mark.parametrize("n, expected", [(0, 1), (2, 1), (4, 3), (6, 15), (3, 0)])
def test_product_moments(n, expected):
    res = ibd_product_expectation(Poly(RP((1,))), n, GaussianLaw(0, 1))
    assert res.value == expected and res.converged


def test_product_exp_n2():
    res = ibd_product_expectation(Exp(1.0), 2, GaussianLaw(0, 1))
    assert res.converged
    assert res.value == pytest.approx(2 * math.exp(0.5), rel=1e-10)


@pytest.mark.parametrize("f", [Exp(0.7), Sin(1.3), Cos(-0.4), Exp(-2.0)], ids=repr)
@pytest.mark.parametrize("n", range(0, 9))
def test_vanishing_low_terms(f, n):
    res = ibd_product_expectation(f, n, GaussianLaw(0, 1.0), TRACE)
    first_live = math.ceil(n / 2)
    assert all(t == 0.0 for t in res.terms[:first_live])
    assert len(res.terms) > first_live


def test_first_live_term_closed_form():
    # m = n/2 for even n: (2m)!/(2^m m!) sigma2^m f(0)
    f, n, s2 = Cos(0.8), 6, 0.5
    res = ibd_product_expectation(f, n, GaussianLaw(0, s2), TRACE)
    m = n // 2
    expected = math.factorial(2 * m) / (2**m * math.factorial(m)) * s2**m * 1.0
    assert res.terms[m] == pytest.approx(expected, rel=1e-15)


def _random_poly(rng, deg):
    c = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(deg + 1)]
    c[-1] = c[-1] or Fraction(1)
    return RP(tuple(c))


@pytest.mark.parametrize("deg", range(0, 13))
def test_polynomial_exactness(deg):
    rng = random.Random(deg)
    for _ in range(20):
        p = _random_poly(rng, deg)
        for s2 in (0.25, 1.0, 4.0, 0.3):
            law_f = GaussianLaw(0.0, s2)
            exact = poly_expectation(p, GaussianLaw(0, Fraction(s2)))
            res = averaged_shift_expectation(Poly(p), law_f)
            assert res.converged
            assert res.terms_used == math.ceil(deg / 2) + 1
            assert abs(res.value - float(exact)) <= max(deg, 1) * math.ulp(float(exact))


@pytest.mark.parametrize("n", range(0, 6))
def test_polynomial_product_general_mean_exact(n):
    rng = random.Random(100 + n)
    for _ in range(10):
        p = _random_poly(rng, rng.randint(0, 8))
        law = GaussianLaw(Fraction(rng.randint(-5, 5), 4), Fraction(rng.randint(1, 8), 3))
        res = ibd_product_expectation(Poly(p), n, law)
        assert res.exact_value == poly_expectation_product(p, n, law)
        assert res.value == float(res.exact_value)


def test_zero_polynomial():
    res = ibd_product_expectation(Poly(RP()), 3, GaussianLaw(0, 1))
    assert res.value == 0.0 and res.converged and res.terms_used == 1


def _lemma_value(f, n, law):
    """Lemma value and the sum of its term magnitudes (scale near exact zeros)."""
    red = reduce_zero_mean(n)
    avgs = {k: exact_expectation(derivative(f, k), law) for k in red.derivative_orders}
    s2 = float(law.sigma2)
    scale = sum(abs(t.coeff * s2**t.sigma2_power * avgs[t.derivative_order]) for t in red.terms)
    return evaluate_reduction(red, law, avgs), scale


@pytest.mark.parametrize("f", iter_catalog(), ids=repr)
@pytest.mark.parametrize("n", range(0, 9))
@pytest.mark.parametrize("s2", [0.25, 1.0])
def test_series_agrees_with_lemma(f, n, s2):
    law = GaussianLaw(0, s2)
    res = ibd_product_expectation(f, n, law)
    assert res.converged
    ref, scale = _lemma_value(f, n, law)
    # e.g. E[cos(X) X^2] = 0 at sigma2 = 1 by cancellation
    assert abs(res.value - ref) <= 1e-9 * scale


@pytest.mark.parametrize("f", [Exp(0.5), Sin(1.0), Cos(2.0), Exp(-1.5)], ids=repr)
def test_general_mean_catalog_against_closed_form(f):
    law = GaussianLaw(0.6, 0.5)
    for n in range(0, 6):
        res = ibd_product_expectation(f, n, law)
        assert res.converged
        red = reduce_general_mean(n)
        avgs = {k: exact_expectation(derivative(f, k), law) for k in red.derivative_orders}
        assert res.value == pytest.approx(evaluate_reduction(red, law, avgs), rel=1e-10)


@pytest.mark.parametrize("a, s2", [(0.5, 1.0), (1.0, 1.0), (-1.2, 1.0), (2.0, 0.25)])
def test_monotone_damping(a, s2):
    assert a * a * s2 / 2 < 1
    res = averaged_shift_expectation(Exp(a), GaussianLaw(0, s2), TRACE)
    mags = [abs(t) for t in res.terms]
    start = next(i for i in range(len(mags) - 1) if mags[i + 1] < mags[i])
    tail = mags[start:]
    assert all(b < c for b, c in zip(tail[1:], tail))


def test_non_convergence_is_reported():
    cfg = AveragedShiftConfig(max_terms=10)
    res = averaged_shift_expectation(Exp(3.0), GaussianLaw(0, 4.0), cfg)
    assert not res.converged
    assert res.terms_used == 10
    assert res.last_term_magnitude > 0
    assert math.isfinite(res.value)


def test_polynomial_cap_is_reported():
    res = averaged_shift_expectation(Poly(RP.monomial(10)), GaussianLaw(0, 1), AveragedShiftConfig(max_terms=3))
    assert not res.converged and res.terms_used == 3


def test_non_finite_term_aborts():
    res = averaged_shift_expectation(Exp(40.0), GaussianLaw(0, 4.0))
    assert not res.converged
    assert not math.isfinite(res.last_term_magnitude)
    assert res.terms_used < 200


def test_negative_n_rejected():
    with pytest.raises(ValueError):
        ibd_product_expectation(Exp(1.0), -1, GaussianLaw())
