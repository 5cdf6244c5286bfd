"""Exhaustive exact identity checks, shared by the CLI and the test suite.

Each suite returns a :class:`SuiteResult`; ``first_failure`` carries the
first counterexample (indices and both sides) or ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .combinatorics import (
    falling_factorial,
    gen_factorial_coeff_table,
    hermite_coeff,
    hermite_coeff_table_via_recurrence,
)
from .stein_core import (
    GENERAL_MEAN,
    ZERO_MEAN,
    recursive_stein_rewriter,
    reduce_general_mean,
    reduce_zero_mean,
)

__all__ = ["SuiteResult", "SUITES", "run_suite"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_n: int
    checks: int
    first_failure: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.first_failure is None


def check_recurrence(max_n: int) -> SuiteResult:
    """H(n+1,k) = (n-2k+2) H(n,k-1) + H(n,k) on the closed-form values,
    plus entry-wise agreement of the recurrence-built table."""
    checks = 0
    for n in range(max_n):
        for k in range((n + 1) // 2 + 1):
            lhs = hermite_coeff(n + 1, k)
            rhs = (n - 2 * k + 2) * hermite_coeff(n, k - 1) + hermite_coeff(n, k)
            checks += 1
            if lhs != rhs:
                return SuiteResult("recurrence", max_n, checks, {"n": n, "k": k, "lhs": lhs, "rhs": rhs})
    table = hermite_coeff_table_via_recurrence(max_n)
    for n in range(max_n + 1):
        for k in range(n // 2 + 1):
            checks += 1
            if table(n, k) != hermite_coeff(n, k):
                return SuiteResult(
                    "recurrence", max_n, checks,
                    {"n": n, "k": k, "lhs": table(n, k), "rhs": hermite_coeff(n, k)},
                )
    return SuiteResult("recurrence", max_n, checks)


def check_lemma2(max_n: int) -> SuiteResult:
    """2^(n-k) H(n,k) == C(n, n-k; 2) and C(n,l;2) == 0 for l < n/2."""
    table = gen_factorial_coeff_table(max_n)
    checks = 0
    for n in range(max_n + 1):
        for k in range(n // 2 + 1):
            lhs = (1 << (n - k)) * hermite_coeff(n, k)
            rhs = table(n, n - k)
            checks += 1
            if lhs != rhs:
                return SuiteResult("lemma2", max_n, checks, {"n": n, "k": k, "lhs": lhs, "rhs": rhs})
        for l in range(0, (n + 1) // 2):
            checks += 1
            if table(n, l) != 0:
                return SuiteResult("lemma2", max_n, checks, {"n": n, "l": l, "lhs": table(n, l), "rhs": 0})
    return SuiteResult("lemma2", max_n, checks)


def check_falling(max_n: int, max_m: Optional[int] = None) -> SuiteResult:
    """(2m)_n == sum_l C(n,l;2) (m)_l for n <= max_n, m <= max_m (default 2*max_n)."""
    max_m = 2 * max_n if max_m is None else max_m
    table = gen_factorial_coeff_table(max_n)
    checks = 0
    for n in range(max_n + 1):
        for m in range(max_m + 1):
            lhs = falling_factorial(2 * m, n)
            rhs = sum(table(n, l) * falling_factorial(m, l) for l in range(n + 1))
            checks += 1
            if lhs != rhs:
                return SuiteResult("falling", max_n, checks, {"n": n, "m": m, "lhs": lhs, "rhs": rhs})
    return SuiteResult("falling", max_n, checks)


def check_stein_vs_recursive(max_n: int) -> SuiteResult:
    checks = 0
    for n in range(max_n + 1):
        for kind, closed in ((ZERO_MEAN, reduce_zero_mean), (GENERAL_MEAN, reduce_general_mean)):
            lhs = closed(n)
            rhs = recursive_stein_rewriter(n, kind)
            checks += 1
            if lhs != rhs:
                return SuiteResult(
                    "stein-vs-recursive", max_n, checks,
                    {"n": n, "law_kind": kind, "lhs": lhs.as_dict(), "rhs": rhs.as_dict()},
                )
    return SuiteResult("stein-vs-recursive", max_n, checks)


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "recurrence": check_recurrence,
    "lemma2": check_lemma2,
    "falling": check_falling,
    "stein-vs-recursive": check_stein_vs_recursive,
}


def run_suite(name: str, max_n: int) -> list[SuiteResult]:
    if name == "all":
        return [fn(max_n) for fn in SUITES.values()]
    try:
        return [SUITES[name](max_n)]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}") from None
