"""Gaussian expectations as truncated series of derivatives (no integration).

For X ~ N(mu, sigma2) and smooth f,

    E[f(X)] = sum_{m>=0} sigma2^m / (2^m m!) * f^(2m)(mu)

and, for the product with a power of X, each term picks up falling
factorials from the Leibniz rule:

    E[f(X) (X-mu)^j] = sum_{m >= j/2} sigma2^m / (2^m m!) * (2m)_j * f^(2m-j)(mu)

``X^n`` is expanded binomially around ``mu``; for ``mu = 0`` only the
``j = n`` piece survives. Polynomial inputs give finite sums and are
evaluated in exact arithmetic (a float mean or variance is taken at its
exact binary value), then rounded once. Catalog functions
are summed in floating point until a stopping rule fires.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .combinatorics import binomial, falling_factorial
from .function_model import AnalyticFunction, Poly
from .stein_core import GaussianLaw

__all__ = [
    "AveragedShiftConfig",
    "SeriesEvaluation",
    "averaged_shift_expectation",
    "ibd_product_expectation",
]


@dataclass(frozen=True)
class AveragedShiftConfig:
    max_terms: int = 200
    rel_tolerance: float = 1e-13
    consecutive_small: int = 3
    keep_trace: bool = False

    def __post_init__(self) -> None:
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.rel_tolerance > 0:
            raise ValueError("rel_tolerance must be > 0")
        if self.consecutive_small < 1:
            raise ValueError("consecutive_small must be >= 1")


@dataclass(frozen=True)
class SeriesEvaluation:
    value: float
    terms_used: int
    converged: bool
    last_term_magnitude: float
    partial_sums: Optional[tuple[float, ...]] = field(default=None, repr=False)
    exact_value: Optional[Fraction] = field(default=None, repr=False)
    terms: Optional[tuple[float, ...]] = field(default=None, repr=False)


def _poly_terms(f: Poly, n: int, law: GaussianLaw, last_m: int):
    # float parameters are dyadic rationals, so this is exact for every law
    mu = Fraction(law.mu)
    s2 = Fraction(law.sigma2)
    weight = Fraction(1)  # sigma2^m / (2^m m!)
    for m in range(last_m + 1):
        if m:
            weight = weight * s2 / (2 * m)
        yield m, weight * _leibniz_sum(f, n, mu, m)


def _leibniz_sum(f: AnalyticFunction, n: int, mu, m: int):
    # sum_j C(n,j) mu^(n-j) (2m)_j f^(2m-j)(mu), j <= min(n, 2m)
    total = mu * 0
    j_lo = n if mu == 0 else 0
    for j in range(j_lo, min(n, 2 * m) + 1):
        deriv = f.derivative(2 * m - j)
        if isinstance(deriv, Poly):
            fx = deriv.poly(mu)
        else:
            fx = float(deriv(float(mu)))
        total += binomial(n, j) * mu ** (n - j) * falling_factorial(2 * m, j) * fx
    return total


def _sum_poly(f: Poly, n: int, law: GaussianLaw, cfg: AveragedShiftConfig) -> SeriesEvaluation:
    deg = f.poly.degree
    # series ends at the first m with 2m >= deg(f x^n); every later term is identically 0
    last_m = 0 if deg is None else math.ceil((deg + n) / 2)
    if last_m + 1 > cfg.max_terms:
        # honour the cap: return the partial sum, flagged
        last_m = cfg.max_terms - 1
        finished = False
    else:
        finished = True
    partial = []
    terms = []
    acc = None
    for _m, term in _poly_terms(f, n, law, last_m):
        acc = term if acc is None else acc + term
        terms.append(float(term))
        partial.append(float(acc))
    return SeriesEvaluation(
        value=float(acc),
        terms_used=last_m + 1,
        converged=finished,
        last_term_magnitude=abs(terms[-1]),
        partial_sums=tuple(partial) if cfg.keep_trace else None,
        exact_value=acc,
        terms=tuple(terms) if cfg.keep_trace else None,
    )


def _sum_catalog(
    f: AnalyticFunction, n: int, law: GaussianLaw, cfg: AveragedShiftConfig
) -> SeriesEvaluation:
    mu = float(law.mu)
    s2 = float(law.sigma2)
    # terms below this index vanish identically for mu == 0
    first_live = math.ceil(n / 2) if mu == 0 else 0
    weight = 1.0
    total = 0.0
    small = 0
    partial: list[float] = []
    terms: list[float] = []
    converged = False
    last = 0.0
    used = 0
    for m in range(cfg.max_terms):
        if m:
            weight *= s2 / (2 * m)
        term = weight * _leibniz_sum(f, n, mu, m)
        used = m + 1
        if not math.isfinite(term):
            last = term
            break
        total += term
        last = abs(term)
        partial.append(total)
        terms.append(term)
        if m < first_live:
            continue
        if last <= cfg.rel_tolerance * abs(total):
            small += 1
            if small >= cfg.consecutive_small:
                converged = True
                break
        else:
            small = 0
    return SeriesEvaluation(
        value=total,
        terms_used=used,
        converged=converged,
        last_term_magnitude=abs(last),
        partial_sums=tuple(partial) if cfg.keep_trace else None,
        terms=tuple(terms) if cfg.keep_trace else None,
    )


def averaged_shift_expectation(
    f: AnalyticFunction,
    law: GaussianLaw,
    cfg: AveragedShiftConfig = AveragedShiftConfig(),
) -> SeriesEvaluation:
    """E[f(X)] from the series of even derivatives of f at the mean.

    Non-convergence within ``cfg.max_terms`` (or a non-finite term) is
    reported through ``converged=False``; the partial sum is still returned.
    """
    return ibd_product_expectation(f, 0, law, cfg)


def ibd_product_expectation(
    f: AnalyticFunction,
    n: int,
    law: GaussianLaw,
    cfg: AveragedShiftConfig = AveragedShiftConfig(),
) -> SeriesEvaluation:
    """E[f(X) X^n] by summing the derivative series of f(x) x^n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(f, Poly):
        return _sum_poly(f, n, law, cfg)
    return _sum_catalog(f, n, law, cfg)
