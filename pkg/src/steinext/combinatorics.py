"""Exact integer combinatorics for the Gaussian reduction formulas.

Everything here works on Python ``int`` (arbitrary precision); no floating
point is involved anywhere in this module.

Tables are built eagerly up to ``max_n`` and are immutable afterwards.
Lookups inside a table distinguish two kinds of "out of range":

* indices in a conventionally-zero region (``k > n/2`` for the Hermite
  triangle, ``l > n`` for the others, negative ``k``) return ``0``;
* rows beyond ``max_n`` raise :class:`IndexError`, since they were never
  computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "factorial",
    "double_factorial",
    "falling_factorial",
    "binomial",
    "hermite_coeff",
    "HermiteCoeffTable",
    "hermite_coeff_table",
    "hermite_coeff_table_via_recurrence",
    "hermite_polynomial",
    "StirlingTables",
    "stirling_tables",
    "stirling_first",
    "stirling_second",
    "GenFactorialTable",
    "gen_factorial_coeff_table",
    "gen_factorial_via_stirling",
    "verify_falling_identity",
]


def _check_nonneg(name: str, value: int) -> None:
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")


def factorial(n: int) -> int:
    _check_nonneg("n", n)
    return math.factorial(n)


def double_factorial(n: int) -> int:
    """n!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for n={n}")
    result = 1
    for j in range(n, 1, -2):
        result *= j
    return result


def falling_factorial(x: int, n: int) -> int:
    """x(x-1)...(x-n+1); the empty product (n=0) is 1."""
    _check_nonneg("n", n)
    result = 1
    for j in range(n):
        result *= x - j
        if result == 0:
            break
    return result


def binomial(n: int, k: int) -> int:
    _check_nonneg("n", n)
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def hermite_coeff(n: int, k: int) -> int:
    """Signless Hermite coefficient n! / (2^k k! (n-2k)!).

    Zero outside ``0 <= k <= n // 2``.
    """
    _check_nonneg("n", n)
    if k < 0 or 2 * k > n:
        return 0
    return math.factorial(n) // (
        (1 << k) * math.factorial(k) * math.factorial(n - 2 * k)
    )


def _check_max_n(max_n: int) -> None:
    _check_nonneg("max_n", max_n)


@dataclass(frozen=True)
class HermiteCoeffTable:
    """Triangle ``rows[n][k] = H(n, k)`` for ``0 <= k <= n // 2``."""

    max_n: int
    rows: tuple[tuple[int, ...], ...]

    def __call__(self, n: int, k: int) -> int:
        if n < 0:
            return 0
        if n > self.max_n:
            raise IndexError(f"row {n} beyond table max_n={self.max_n}")
        if k < 0 or 2 * k > n:
            return 0
        return self.rows[n][k]

    def row(self, n: int) -> tuple[int, ...]:
        if not 0 <= n <= self.max_n:
            raise IndexError(f"row {n} outside 0..{self.max_n}")
        return self.rows[n]


def hermite_coeff_table(max_n: int) -> HermiteCoeffTable:
    """Table from the closed-form expression."""
    _check_max_n(max_n)
    rows = tuple(
        tuple(hermite_coeff(n, k) for k in range(n // 2 + 1)) for n in range(max_n + 1)
    )
    return HermiteCoeffTable(max_n, rows)


def hermite_coeff_table_via_recurrence(max_n: int) -> HermiteCoeffTable:
    """Table from H(n+1, k) = (n - 2k + 2) H(n, k-1) + H(n, k), H(0, 0) = 1.

    No factorials are used, so this is an independent construction of the
    same triangle.
    """
    _check_max_n(max_n)
    rows: list[tuple[int, ...]] = [(1,)]
    for n in range(max_n):
        prev = rows[-1]

        def h(k: int) -> int:
            return prev[k] if 0 <= k < len(prev) else 0

        rows.append(
            tuple((n - 2 * k + 2) * h(k - 1) + h(k) for k in range((n + 1) // 2 + 1))
        )
    return HermiteCoeffTable(max_n, tuple(rows))


def hermite_polynomial(n: int) -> list[int]:
    """Coefficients of He_n, lowest power first.

    >>> hermite_polynomial(4)
    [3, 0, -6, 0, 1]
    """
    _check_nonneg("n", n)
    coeffs = [0] * (n + 1)
    for k in range(n // 2 + 1):
        coeffs[n - 2 * k] = (-1) ** k * hermite_coeff(n, k)
    return coeffs


@dataclass(frozen=True)
class StirlingTables:
    """Signed first-kind ``s(n, k)`` and second-kind ``S(n, k)`` triangles."""

    max_n: int
    first_kind: tuple[tuple[int, ...], ...]
    second_kind: tuple[tuple[int, ...], ...]

    def _lookup(self, table: Sequence[Sequence[int]], n: int, k: int) -> int:
        if n < 0 or k < 0:
            return 0
        if n > self.max_n:
            raise IndexError(f"row {n} beyond table max_n={self.max_n}")
        if k > n:
            return 0
        return table[n][k]

    def s(self, n: int, k: int) -> int:
        return self._lookup(self.first_kind, n, k)

    def S(self, n: int, k: int) -> int:
        return self._lookup(self.second_kind, n, k)


def stirling_tables(max_n: int) -> StirlingTables:
    # s(n+1,k) = s(n,k-1) - n s(n,k);  S(n+1,k) = S(n,k-1) + k S(n,k)
    _check_max_n(max_n)
    first: list[list[int]] = [[1]]
    second: list[list[int]] = [[1]]
    for n in range(max_n):
        ps, pS = first[-1], second[-1]
        row_s = [0] * (n + 2)
        row_S = [0] * (n + 2)
        for k in range(n + 2):
            prev_s = ps[k] if k <= n else 0
            prev_S = pS[k] if k <= n else 0
            left_s = ps[k - 1] if k >= 1 else 0
            left_S = pS[k - 1] if k >= 1 else 0
            row_s[k] = left_s - n * prev_s
            row_S[k] = left_S + k * prev_S
        first.append(row_s)
        second.append(row_S)
    return StirlingTables(
        max_n,
        tuple(tuple(r) for r in first),
        tuple(tuple(r) for r in second),
    )


def stirling_first(n: int, k: int) -> int:
    _check_nonneg("n", n)
    _check_nonneg("k", k)
    return stirling_tables(n).s(n, k)


def stirling_second(n: int, k: int) -> int:
    _check_nonneg("n", n)
    _check_nonneg("k", k)
    return stirling_tables(n).S(n, k)


@dataclass(frozen=True)
class GenFactorialTable:
    """Generalized factorial coefficients ``C(n, l; 2)``, ``0 <= l <= n``.

    These are the connection coefficients
    ``(2m)_n = sum_l C(n, l; 2) * (m)_l`` between falling factorials.
    """

    max_n: int
    entries: tuple[tuple[int, ...], ...]

    def __call__(self, n: int, l: int) -> int:
        if n < 0:
            return 0
        if n > self.max_n:
            raise IndexError(f"row {n} beyond table max_n={self.max_n}")
        if l < 0 or l > n:
            return 0
        return self.entries[n][l]

    def row(self, n: int) -> tuple[int, ...]:
        if not 0 <= n <= self.max_n:
            raise IndexError(f"row {n} outside 0..{self.max_n}")
        return self.entries[n]


def gen_factorial_coeff_table(max_n: int) -> GenFactorialTable:
    """Build ``C(n, l; 2)`` from C(n+1,l) = (2l - n) C(n,l) + 2 C(n,l-1)."""
    _check_max_n(max_n)
    entries: list[tuple[int, ...]] = [(1,)]
    for n in range(max_n):
        prev = entries[-1]

        def c(l: int) -> int:
            return prev[l] if 0 <= l <= n else 0

        row = [0] + [(2 * l - n) * c(l) + 2 * c(l - 1) for l in range(1, n + 2)]
        entries.append(tuple(row))
    return GenFactorialTable(max_n, tuple(entries))


def gen_factorial_via_stirling(
    n: int, l: int, tables: Optional[StirlingTables] = None
) -> int:
    """``sum_{k=l}^{n} 2^k s(n, k) S(k, l)``.

    The power of two follows the inner index ``k``; with ``2^l`` the sum
    does not reproduce the recurrence (e.g. it vanishes at n=2, l=1).
    """
    if not 0 <= l <= n:
        raise ValueError(f"need 0 <= l <= n, got n={n}, l={l}")
    if tables is None or tables.max_n < n:
        tables = stirling_tables(n)
    return sum((1 << k) * tables.s(n, k) * tables.S(k, l) for k in range(l, n + 1))


def verify_falling_identity(
    n: int, m: int, table: Optional[GenFactorialTable] = None
) -> bool:
    """Check ``(2m)_n == sum_l C(n, l; 2) (m)_l`` exactly."""
    _check_nonneg("n", n)
    _check_nonneg("m", m)
    if table is None or table.max_n < n:
        table = gen_factorial_coeff_table(n)
    lhs = falling_factorial(2 * m, n)
    rhs = sum(table(n, l) * falling_factorial(m, l) for l in range(n + 1))
    return lhs == rhs
