"""Numerical ground truth for E[g(X) X^n]: Gauss-Hermite quadrature and Monte Carlo.

Quadrature uses the physicists' weight ``exp(-t**2)`` on the real line::

    E[h(X)] = pi**-0.5 * sum_i w_i h(mu + sqrt(2 sigma2) t_i)

so ``sum(w_i) == sqrt(pi)``. An N-point rule is exact for polynomials of
degree <= 2N - 1.

Monte Carlo draws come from :mod:`steinext._kernels` (SplitMix64 + polar
Box-Muller). A run is bit-reproducible for a fixed ``(seed, samples)`` on a
given backend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _kernels
from .function_model import AnalyticFunction
from .stein_core import GaussianLaw

__all__ = [
    "MAX_ORDER",
    "QuadratureRule",
    "gauss_hermite_rule",
    "quadrature_expectation",
    "McEstimate",
    "monte_carlo_expectation",
]

MAX_ORDER = 256

Integrand = Union[AnalyticFunction, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class QuadratureRule:
    order: int
    nodes: np.ndarray
    weights: np.ndarray


_RULE_CACHE: dict[tuple[int, str], QuadratureRule] = {}


def gauss_hermite_rule(order: int, backend: str | None = None) -> QuadratureRule:
    """Nodes and weights for the weight exp(-t^2), ``1 <= order <= 256``."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise ValueError(f"quadrature order must be in 1..{MAX_ORDER}, got {order!r}")
    backend = backend or _kernels.BACKEND
    key = (int(order), backend)
    rule = _RULE_CACHE.get(key)
    if rule is None:
        nodes, weights = _kernels.gauss_hermite(int(order), backend=backend)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        rule = QuadratureRule(int(order), nodes, weights)
        _RULE_CACHE[key] = rule
    return rule


def _evaluate(g: Integrand, x: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(g(x), dtype=float)
    except TypeError:
        values = None
    if values is None or values.shape != x.shape:
        # scalar-only callables
        values = np.array([float(g(float(xi))) for xi in x])
    return values


def quadrature_expectation(
    g: Integrand, n: int, law: GaussianLaw, order: int = 64
) -> float:
    """E[g(X) X^n] by an ``order``-point Gauss-Hermite rule."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rule = gauss_hermite_rule(order)
    x = float(law.mu) + math.sqrt(2.0 * float(law.sigma2)) * rule.nodes
    gx = _evaluate(g, x)
    bad = ~np.isfinite(gx)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(f"integrand is not finite at node {i} (x={x[i]!r}): {gx[i]!r}")
    return float(np.dot(rule.weights, gx * x**n)) / math.sqrt(math.pi)


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    samples: int
    seed: int


def monte_carlo_expectation(
    g: Integrand,
    n: int,
    law: GaussianLaw,
    samples: int = 1_000_000,
    seed: int = 0,
    backend: str | None = None,
) -> McEstimate:
    """Sample mean of g(X) X^n with its standard error."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if n < 0:
        raise ValueError("n must be non-negative")
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    z = _kernels.standard_normals(seed, samples, backend=backend)
    x = float(law.mu) + math.sqrt(float(law.sigma2)) * z
    values = _evaluate(g, x) * x**n
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite Monte Carlo sample values")
    mean = float(values.mean())
    std_error = float(values.std(ddof=1)) / math.sqrt(samples)
    return McEstimate(mean, std_error, samples, seed)
