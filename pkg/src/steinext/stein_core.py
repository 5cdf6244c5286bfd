"""Symbolic reduction of E[g(X) X^n] for a Gaussian X ~ N(mu, sigma2).

A :class:`Reduction` is a finite sum of terms

    coeff * mu**mu_power * sigma2**sigma2_power * E[g^(derivative_order)(X)]

with exact integer coefficients. Two independent producers exist:

* the closed forms (:func:`reduce_zero_mean`, :func:`reduce_general_mean`),
  whose coefficients are signless Hermite coefficients (times binomials);
* :func:`recursive_stein_rewriter`, which knows nothing about Hermite
  coefficients and simply applies ``E[h(X)(X - mu)] = sigma2 E[h'(X)]``
  with the product rule until no power of ``X - mu`` is left.

Integrability of every average involved is the caller's responsibility.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Mapping, Union

from .combinatorics import binomial, double_factorial, hermite_coeff

__all__ = [
    "ZERO_MEAN",
    "GENERAL_MEAN",
    "GaussianLaw",
    "ReductionTerm",
    "Reduction",
    "MomentPolynomial",
    "ReductionStats",
    "reduce_zero_mean",
    "reduce_general_mean",
    "recursive_stein_rewriter",
    "reduction_stats",
    "central_moment",
    "raw_moment",
    "evaluate_reduction",
    "evaluate_reduction_exact",
]

ZERO_MEAN = "zero_mean"
GENERAL_MEAN = "general_mean"
_LAW_KINDS = (ZERO_MEAN, GENERAL_MEAN)

Number = Union[int, Fraction, float]


@dataclass(frozen=True)
class GaussianLaw:
    """Parameters of X ~ N(mu, sigma2).

    ``mu`` and ``sigma2`` may be ``int``/``Fraction`` (exact paths keep them
    exact) or ``float``. Degenerate laws (``sigma2 <= 0``) are rejected.
    """

    mu: Number = 0
    sigma2: Number = 1

    def __post_init__(self) -> None:
        for name in ("mu", "sigma2"):
            value = getattr(self, name)
            if not isinstance(value, Real) or isinstance(value, bool):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in (self.mu, self.sigma2))


@dataclass(frozen=True, order=True)
class ReductionTerm:
    # field order doubles as the canonical sort key
    derivative_order: int
    mu_power: int
    sigma2_power: int
    coeff: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.derivative_order, self.mu_power, self.sigma2_power)


@dataclass(frozen=True)
class Reduction:
    n: int
    law_kind: str
    terms: tuple[ReductionTerm, ...]

    def __post_init__(self) -> None:
        if self.law_kind not in _LAW_KINDS:
            raise ValueError(f"unknown law kind {self.law_kind!r}")

    @classmethod
    def from_mapping(
        cls, n: int, law_kind: str, coeffs: Mapping[tuple[int, int, int], int]
    ) -> "Reduction":
        """Canonical reduction from ``{(order, mu_pow, s2_pow): coeff}``; drops zeros."""
        terms = tuple(
            sorted(
                ReductionTerm(order, mu_pow, s2_pow, c)
                for (order, mu_pow, s2_pow), c in coeffs.items()
                if c != 0
            )
        )
        return cls(n, law_kind, terms)

    def as_dict(self) -> dict[tuple[int, int, int], int]:
        return {t.key: t.coeff for t in self.terms}

    @property
    def derivative_orders(self) -> list[int]:
        return sorted({t.derivative_order for t in self.terms})

    def __len__(self) -> int:
        return len(self.terms)


def _check_n(n: int) -> None:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")


def reduce_zero_mean(n: int) -> Reduction:
    """E[g(X) X^n] = sum_k H(n,k) sigma2^(n-k) E[g^(n-2k)(X)] for mu = 0."""
    _check_n(n)
    coeffs = {(n - 2 * k, 0, n - k): hermite_coeff(n, k) for k in range(n // 2 + 1)}
    return Reduction.from_mapping(n, ZERO_MEAN, coeffs)


def _general_mean_addends(n: int):
    # uncollected double sum over (l, k), one addend per pair
    for l in range(n + 1):
        b = binomial(n, l)
        for k in range(l // 2 + 1):
            yield (l - 2 * k, n - l, l - k), b * hermite_coeff(l, k)


def reduce_general_mean(n: int) -> Reduction:
    """Closed form for X ~ N(mu, sigma2) with arbitrary mu.

    Built as the double sum over ``l`` (binomial split of ``X^n`` around
    ``mu``) and ``k`` (zero-mean reduction of each piece), then merged.
    """
    _check_n(n)
    coeffs: dict[tuple[int, int, int], int] = {}
    for key, c in _general_mean_addends(n):
        coeffs[key] = coeffs.get(key, 0) + c
    return Reduction.from_mapping(n, GENERAL_MEAN, coeffs)


@dataclass(frozen=True)
class ReductionStats:
    final_term_count: int
    peak_intermediate_term_count: int
    rewrite_steps: int


def _rewrite(n: int, law_kind: str) -> tuple[Reduction, ReductionStats]:
    # Working state, bucketed by centred power p:
    #   levels[p][(j, mu_pow, s2_pow)] = coeff
    # standing for coeff * mu^mu_pow * sigma2^s2_pow * E[g^(j)(X) (X-mu)^p].
    levels: list[dict[tuple[int, int, int], int]] = [{} for _ in range(n + 1)]
    if law_kind == ZERO_MEAN:
        levels[n][(0, 0, 0)] = 1
    elif law_kind == GENERAL_MEAN:
        # X^n = sum_p C(n, p) mu^(n-p) (X - mu)^p
        for p in range(n + 1):
            levels[p][(0, n - p, 0)] = binomial(n, p)
    else:
        raise ValueError(f"unknown law kind {law_kind!r}")

    live = sum(len(level) for level in levels)
    peak = live
    steps = 0
    # highest centred power first; within a level, ascending key order
    for p in range(n, 0, -1):
        level = levels[p]
        for key in sorted(level):
            j, a, b = key
            c = level.pop(key)
            live -= 1
            # E[h (X-mu)] = sigma2 E[h'] with h = g^(j) (x-mu)^(p-1):
            #   h' = g^(j+1) (x-mu)^(p-1) + (p-1) g^(j) (x-mu)^(p-2)
            targets = [(levels[p - 1], (j + 1, a, b + 1), c)]
            if p >= 2:
                targets.append((levels[p - 2], (j, a, b + 1), (p - 1) * c))
            for bucket, new_key, add in targets:
                old = bucket.get(new_key, 0)
                total = old + add
                if total:
                    bucket[new_key] = total
                    live += old == 0
                else:
                    del bucket[new_key]
                    live -= 1
            steps += 1
            peak = max(peak, live)

    red = Reduction.from_mapping(n, law_kind, levels[0])
    return red, ReductionStats(len(red), peak, steps)


def recursive_stein_rewriter(n: int, law_kind: str = ZERO_MEAN) -> Reduction:
    """Reduce E[g(X) X^n] by repeated one-step Stein rewriting."""
    _check_n(n)
    return _rewrite(n, law_kind)[0]


def reduction_stats(
    n: int, method: str = "closed_form", law_kind: str = ZERO_MEAN
) -> ReductionStats:
    """Size counters for the two reduction strategies.

    The closed form performs no rewriting, so its peak equals its final
    term count. For the recursive strategy the peak is the largest number
    of distinct pending averages seen after any single rewrite.
    """
    _check_n(n)
    if method == "closed_form":
        red = reduce_zero_mean(n) if law_kind == ZERO_MEAN else reduce_general_mean(n)
        return ReductionStats(len(red), len(red), 0)
    if method == "recursive":
        return _rewrite(n, law_kind)[1]
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class MomentPolynomial:
    """Integer polynomial in (mu, sigma2): ``{(mu_pow, s2_pow): coeff}``."""

    coeffs: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_dict(cls, d: Mapping[tuple[int, int], int]) -> "MomentPolynomial":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v != 0)))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.coeffs)

    def __call__(self, mu: Number = 0, sigma2: Number = 1) -> Number:
        return sum(
            (c * mu**a * sigma2**b for (a, b), c in self.coeffs),
            start=0,
        )

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b), c in sorted(self.coeffs, key=lambda t: (-t[0][0], t[0][1])):
            factors = [] if c == 1 and (a or b) else [str(c)]
            if a:
                factors.append("mu" if a == 1 else f"mu^{a}")
            if b:
                factors.append("sigma2" if b == 1 else f"sigma2^{b}")
            parts.append("*".join(factors))
        return " + ".join(parts)


def central_moment(n: int) -> MomentPolynomial:
    """E[(X - mu)^n]: zero for odd n, (n-1)!! sigma^n for even n."""
    _check_n(n)
    if n % 2:
        return MomentPolynomial.from_dict({})
    return MomentPolynomial.from_dict({(0, n // 2): double_factorial(n - 1)})


def raw_moment(n: int) -> MomentPolynomial:
    """E[X^n] as a polynomial in (mu, sigma2).

    Obtained from the general-mean reduction with g = 1, where every
    derivative average except the zeroth vanishes and E[g] = 1.
    """
    red = reduce_general_mean(n)
    return MomentPolynomial.from_dict(
        {(t.mu_power, t.sigma2_power): t.coeff for t in red.terms if t.derivative_order == 0}
    )


def _require_averages(red: Reduction, averages: Mapping[int, Number]) -> None:
    for order in red.derivative_orders:
        if order not in averages:
            raise KeyError(f"no derivative average supplied for order {order}")


def evaluate_reduction(
    red: Reduction, law: GaussianLaw, derivative_averages: Mapping[int, float]
) -> float:
    """Numerical value of a reduction given E[g^(l)(X)] for each order l."""
    _require_averages(red, derivative_averages)
    mu = float(law.mu)
    sigma2 = float(law.sigma2)
    total = 0.0
    for t in red.terms:
        avg = float(derivative_averages[t.derivative_order])
        if not math.isfinite(avg):
            raise ValueError(
                f"non-finite average {avg!r} for derivative order {t.derivative_order}"
            )
        total += t.coeff * mu**t.mu_power * sigma2**t.sigma2_power * avg
    return total


def evaluate_reduction_exact(
    red: Reduction, law: GaussianLaw, derivative_averages: Mapping[int, Fraction]
) -> Fraction:
    """Same as :func:`evaluate_reduction` in exact rational arithmetic."""
    if not law.is_exact:
        raise TypeError("exact evaluation needs int/Fraction mu and sigma2")
    _require_averages(red, derivative_averages)
    mu = Fraction(law.mu)
    sigma2 = Fraction(law.sigma2)
    return sum(
        (
            t.coeff * mu**t.mu_power * sigma2**t.sigma2_power
            * Fraction(derivative_averages[t.derivative_order])
            for t in red.terms
        ),
        start=Fraction(0),
    )
