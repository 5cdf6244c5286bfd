"""Test functions g: exact rational polynomials and an analytic catalog.

Catalog members (:class:`Poly`, :class:`Exp`, :class:`Sin`, :class:`Cos`)
are closed under differentiation. Derivatives are tracked by an integer
``order`` on top of the base function, so ``derivative(f, j + k)`` and
``derivative(derivative(f, j), k)`` are the same object, not merely close.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .combinatorics import binomial, double_factorial
from .stein_core import GaussianLaw, raw_moment

__all__ = [
    "RationalPolynomial",
    "poly_derivative",
    "parse_rational",
    "AnalyticFunction",
    "Poly",
    "Exp",
    "Sin",
    "Cos",
    "derivative",
    "exact_expectation",
    "poly_expectation",
    "poly_expectation_product",
    "direct_raw_moment",
    "mgf_derivative_polynomial",
    "mgf_product_oracle",
    "parse_function",
]

Scalar = Union[int, Fraction, float]


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer, or a finite decimal literal exactly."""
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse {text!r} as a rational number") from exc
    return value


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with Fraction coefficients, lowest power first.

    Trailing zeros are stripped on construction; the zero polynomial has
    ``coeffs == ()`` and ``degree is None``.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_string(cls, text: str) -> "RationalPolynomial":
        """``"1,0,-1/2"`` -> 1 - x^2/2."""
        return cls(tuple(parse_rational(part) for part in text.split(",")))

    @classmethod
    def monomial(cls, power: int, coeff: Scalar = 1) -> "RationalPolynomial":
        return cls((0,) * power + (Fraction(coeff),))

    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        if self.is_zero or other.is_zero:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(tuple(out))

    def shift_power(self, n: int) -> "RationalPolynomial":
        """Multiply by x**n."""
        if self.is_zero:
            return self
        return RationalPolynomial((Fraction(0),) * n + self.coeffs)

    def derivative(self, order: int = 1) -> "RationalPolynomial":
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        c = self.coeffs
        return RationalPolynomial(
            tuple(
                c[i] * math.perm(i, order) for i in range(order, len(c))
            )
        )

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction x, vectorised for arrays."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for a in reversed(self.coeffs):
                acc = acc * x + a
            return acc
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for a in reversed(self.coeffs):
            acc = acc * x + float(a)
        return acc if acc.ndim else float(acc)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and a == 1:
                parts.append(mono)
            elif mono:
                parts.append(f"{a}*{mono}")
            else:
                parts.append(str(a))
        return " + ".join(parts)


def poly_derivative(p: RationalPolynomial, order: int) -> RationalPolynomial:
    return p.derivative(order)


# --- analytic catalog -------------------------------------------------------


@dataclass(frozen=True)
class AnalyticFunction:
    """Base class: the ``order``-th derivative of a catalog function."""

    order: int = field(default=0, kw_only=True)

    def derivative(self, k: int = 1) -> "AnalyticFunction":
        if k < 0:
            raise ValueError("derivative order must be non-negative")
        return self._with_order(self.order + k)

    def _with_order(self, order: int) -> "AnalyticFunction":
        raise NotImplementedError

    def __call__(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class Poly(AnalyticFunction):
    poly: RationalPolynomial = RationalPolynomial()

    def _with_order(self, order: int) -> "Poly":
        # differentiate eagerly; polynomials carry no base to return to
        return Poly(self.poly.derivative(order - self.order))

    def __call__(self, x):
        return self.poly(x)


def _power(a: Scalar, k: int) -> float:
    # a**k that saturates to +-inf instead of raising OverflowError
    try:
        return float(a) ** k
    except OverflowError:
        return math.copysign(math.inf, float(a)) if k % 2 else math.inf


def _check_param(a: Scalar) -> None:
    if not math.isfinite(a) or a == 0:
        raise ValueError(f"catalog parameter must be finite and non-zero, got {a!r}")


@dataclass(frozen=True)
class Exp(AnalyticFunction):
    """d^order/dx^order exp(a x) = a**order * exp(a x)."""

    a: Scalar = 1

    def __post_init__(self) -> None:
        _check_param(self.a)

    def _with_order(self, order: int) -> "Exp":
        return Exp(self.a, order=order)

    @property
    def scale(self) -> float:
        return _power(self.a, self.order)

    def __call__(self, x):
        return self.scale * np.exp(float(self.a) * np.asarray(x, dtype=float))


# derivative cycle for sin: sin -> cos -> -sin -> -cos
_SIN_CYCLE = ((1, "sin"), (1, "cos"), (-1, "sin"), (-1, "cos"))


@dataclass(frozen=True)
class _Trig(AnalyticFunction):
    a: Scalar = 1
    _phase: int = field(default=0, init=False, repr=False)

    def __post_init__(self) -> None:
        _check_param(self.a)

    def _with_order(self, order: int):
        return type(self)(self.a, order=order)

    def signed_base(self) -> tuple[int, str]:
        """(sign, 'sin'|'cos') such that f = sign * a**order * base(a x)."""
        return _SIN_CYCLE[(self.order + self._phase) % 4]

    @property
    def scale(self) -> float:
        return _power(self.a, self.order)

    def __call__(self, x):
        sign, base = self.signed_base()
        fn = np.sin if base == "sin" else np.cos
        return sign * self.scale * fn(float(self.a) * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Sin(_Trig):
    _phase: int = field(default=0, init=False, repr=False)


@dataclass(frozen=True)
class Cos(_Trig):
    _phase: int = field(default=1, init=False, repr=False)


def derivative(f: AnalyticFunction, order: int) -> AnalyticFunction:
    return f.derivative(order)


# --- exact expectations ------------------------------------------------------


def direct_raw_moment(j: int, mu: Scalar, sigma2: Scalar) -> Scalar:
    """E[X^j] by binomial expansion of (mu + sigma Z)^j, E[Z^2i] = (2i-1)!!.

    Kept separate from the reduction engine on purpose: it is the
    independent route used to check it.
    """
    total = mu * 0
    for i in range(j // 2 + 1):
        total += binomial(j, 2 * i) * mu ** (j - 2 * i) * sigma2**i * double_factorial(2 * i - 1)
    return total


def poly_expectation(p: RationalPolynomial, law: GaussianLaw) -> Scalar:
    """E[p(X)] through the reduction engine's raw moments (exact if law is)."""
    if law.is_exact:
        mu, s2 = Fraction(law.mu), Fraction(law.sigma2)
    else:
        mu, s2 = float(law.mu), float(law.sigma2)
    total = Fraction(0) if law.is_exact else 0.0
    for j, c in enumerate(p.coeffs):
        if c:
            m = raw_moment(j)(mu, s2)
            total += (c if law.is_exact else float(c)) * m
    return total


def poly_expectation_product(p: RationalPolynomial, n: int, law: GaussianLaw) -> Fraction:
    """E[p(X) X^n] exactly, by expanding p(x) x^n in raw moments.

    Raw moments come from :func:`direct_raw_moment`, not from the
    reduction engine.
    """
    if not law.is_exact:
        raise TypeError("poly_expectation_product needs int/Fraction mu and sigma2")
    mu, s2 = Fraction(law.mu), Fraction(law.sigma2)
    q = p.shift_power(n)
    return sum(
        (c * direct_raw_moment(j, mu, s2) for j, c in enumerate(q.coeffs) if c),
        start=Fraction(0),
    )


def exact_expectation(f: AnalyticFunction, law: GaussianLaw) -> float:
    """Closed-form E[f(X)] for any catalog member under N(mu, sigma2)."""
    if isinstance(f, Poly):
        return float(poly_expectation(f.poly, law))
    mu, s2 = float(law.mu), float(law.sigma2)
    a = float(f.a)
    if isinstance(f, Exp):
        return f.scale * math.exp(a * mu + 0.5 * a * a * s2)
    if isinstance(f, _Trig):
        sign, base = f.signed_base()
        damp = math.exp(-0.5 * a * a * s2)
        trig = math.sin(a * mu) if base == "sin" else math.cos(a * mu)
        return sign * f.scale * damp * trig
    raise TypeError(f"not a catalog function: {f!r}")


# --- moment-generating-function oracle --------------------------------------


def mgf_derivative_polynomial(n: int, mu: Scalar, sigma2: Scalar) -> list:
    """Coefficients of P_n(u) with d^n/du^n M(u) = P_n(u) M(u).

    M(u) = exp(mu u + sigma2 u^2 / 2) is the Gaussian MGF. Each step applies
    (P M)' = (P' + P (mu + sigma2 u)) M, so ``P_n(0) = E[X^n]`` and
    ``P_n(a) M(a) = E[X^n exp(a X)]``. Coefficient type follows the inputs.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    zero = mu * 0
    p = [zero + 1]
    for _ in range(n):
        nxt = [zero] * (len(p) + 1)
        for i, c in enumerate(p):
            if i:
                nxt[i - 1] += i * c
            nxt[i] += mu * c
            nxt[i + 1] += sigma2 * c
        p = nxt
    return p


def mgf_product_oracle(n: int, a: float, law: GaussianLaw) -> float:
    """E[X^n exp(a X)] as the n-th derivative of the MGF evaluated at a."""
    mu, s2 = float(law.mu), float(law.sigma2)
    coeffs = mgf_derivative_polynomial(n, mu, s2)
    value = 0.0
    for c in reversed(coeffs):
        value = value * a + c
    return value * math.exp(a * mu + 0.5 * a * a * s2)


def parse_function(spec: str) -> AnalyticFunction:
    """Parse ``poly:c0,c1,...`` or ``exp:a`` / ``sin:a`` / ``cos:a``.

    Catalog parameters accept ``p/q`` rationals or decimal literals.
    """
    kind, sep, arg = spec.partition(":")
    kind = kind.strip().lower()
    if not sep or not arg.strip():
        raise ValueError(f"function spec {spec!r} must look like kind:args")
    if kind == "poly":
        return Poly(RationalPolynomial.from_string(arg))
    cls = {"exp": Exp, "sin": Sin, "cos": Cos}.get(kind)
    if cls is None:
        raise ValueError(f"unknown function kind {kind!r}")
    return cls(parse_rational(arg))


def iter_catalog(params: Iterable[float] = (0.5, 1.0)) -> Sequence[AnalyticFunction]:
    """A small default grid of catalog members, used by tests and the CLI."""
    out: list[AnalyticFunction] = [
        Poly(RationalPolynomial((1,))),
        Poly(RationalPolynomial((Fraction(1), Fraction(-2), Fraction(0), Fraction(1, 3)))),
    ]
    for a in params:
        out.extend([Exp(a), Sin(a), Cos(a)])
    return out
