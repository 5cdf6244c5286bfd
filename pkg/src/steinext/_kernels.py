"""Hot numeric loops behind the quadrature and Monte Carlo oracles.

Every kernel has two implementations:

* ``*_numba`` -- compiled with ``numba.njit`` (sequential, scalar loops);
* ``*_numpy`` -- vectorised NumPy, no compiler needed.

``STEINEXT_DISABLE_NUMBA=1`` (or a missing numba install) selects the
NumPy path. Both paths produce the same normal-variate stream bit for bit:
the generator is counter-based, so the vectorised version can address the
same positions the sequential one walks through, and both take the
logarithm from the C library.

PRNG: SplitMix64. Draw ``i`` (0-based) of stream ``seed`` is
``mix(seed + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)`` where ``mix`` is the
standard SplitMix64 finaliser. A uniform on (-1, 1) is
``(x >> 11) * 2**-52 - 1``. Normals use the polar Box-Muller method on
consecutive pairs of draws, rejecting pairs with ``s = u*u + v*v`` outside
``(0, 1)`` and emitting ``u*f`` then ``v*f`` with ``f = sqrt(-2 ln s / s)``.
"""
from __future__ import annotations

import math
import os

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_M52 = 2.0**-52

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("STEINEXT_DISABLE_NUMBA", "") not in (
    "1",
    "true",
    "yes",
)
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if not NUMBA_AVAILABLE:
        return fn
    return numba.njit(cache=True)(fn)


# --- Gauss-Hermite ------------------------------------------------------------


@_njit
def _hermite_eval(t, n):
    # orthonormal physicists' Hermite: returns (p_n(t), p_{n-1}(t))
    p1 = math.pi**-0.25
    p2 = 0.0
    for j in range(1, n + 1):
        p3 = p2
        p2 = p1
        p1 = t * math.sqrt(2.0 / j) * p2 - math.sqrt((j - 1.0) / j) * p3
    return p1, p2


@_njit
def _wkb_guess(n, k):
    # k-th largest root (k >= 1) from the semiclassical condition
    #   theta - sin(theta) = (4k - 1) pi / (2n + 1),  t = sqrt(2n + 1) cos(theta / 2)
    nu = 2.0 * n + 1.0
    c = (4.0 * k - 1.0) * math.pi / nu
    theta = (6.0 * c) ** (1.0 / 3.0)
    for _ in range(50):
        step = (theta - math.sin(theta) - c) / (1.0 - math.cos(theta))
        theta -= step
        if abs(step) < 1e-15:
            break
    return math.sqrt(nu) * math.cos(0.5 * theta)


@_njit
def _gauss_hermite_seq(n, tol, max_iter):
    nodes = np.zeros(n)
    weights = np.zeros(n)
    for i in range(n // 2):
        z = _wkb_guess(n, i + 1)
        for _ in range(max_iter):
            p1, p2 = _hermite_eval(z, n)
            dz = p1 / (math.sqrt(2.0 * n) * p2)
            z -= dz
            if abs(dz) <= tol * max(1.0, abs(z)):
                break
        p1, p2 = _hermite_eval(z, n)
        pp = math.sqrt(2.0 * n) * p2
        nodes[n - 1 - i] = z
        nodes[i] = -z
        weights[i] = 2.0 / (pp * pp)
        weights[n - 1 - i] = weights[i]
    if n % 2 == 1:
        p1, p2 = _hermite_eval(0.0, n)
        pp = math.sqrt(2.0 * n) * p2
        weights[n // 2] = 2.0 / (pp * pp)
    return nodes, weights


def gauss_hermite_numba(n: int, tol: float = 1e-14, max_iter: int = 100):
    return _gauss_hermite_seq(n, tol, max_iter)


def _hermite_eval_vec(t: np.ndarray, n: int):
    p1 = np.full_like(t, math.pi**-0.25)
    p2 = np.zeros_like(t)
    for j in range(1, n + 1):
        p3 = p2
        p2 = p1
        p1 = t * math.sqrt(2.0 / j) * p2 - math.sqrt((j - 1.0) / j) * p3
    return p1, p2


def _wkb_guess_vec(n: int) -> np.ndarray:
    k = np.arange(1, n // 2 + 1, dtype=float)
    nu = 2.0 * n + 1.0
    c = (4.0 * k - 1.0) * math.pi / nu
    theta = np.cbrt(6.0 * c)
    for _ in range(50):
        step = (theta - np.sin(theta) - c) / (1.0 - np.cos(theta))
        theta = theta - step
        if np.all(np.abs(step) < 1e-15):
            break
    return np.sqrt(nu) * np.cos(0.5 * theta)


def gauss_hermite_numpy(n: int, tol: float = 1e-14, max_iter: int = 100):
    """Same algorithm as the compiled kernel, Newton run on all roots at once."""
    z = _wkb_guess_vec(n)
    for _ in range(max_iter):
        p1, p2 = _hermite_eval_vec(z, n)
        dz = p1 / (math.sqrt(2.0 * n) * p2)
        z = z - dz
        if np.all(np.abs(dz) <= tol * np.maximum(1.0, np.abs(z))):
            break
    pos = np.sort(z)
    if n % 2:
        pos = np.concatenate(([0.0], pos))
    _, p2 = _hermite_eval_vec(pos, n)
    pp = math.sqrt(2.0 * n) * p2
    w_pos = 2.0 / (pp * pp)
    if n % 2:
        nodes = np.concatenate((-pos[:0:-1], pos))
        weights = np.concatenate((w_pos[:0:-1], w_pos))
    else:
        nodes = np.concatenate((-pos[::-1], pos))
        weights = np.concatenate((w_pos[::-1], w_pos))
    return nodes, weights


# --- SplitMix64 + polar Box-Muller ------------------------------------------


@_njit
def _normals_seq(seed, count, out):
    state = np.uint64(seed)
    golden = np.uint64(_GOLDEN)
    m1 = np.uint64(_M1)
    m2 = np.uint64(_M2)
    s30 = np.uint64(30)
    s27 = np.uint64(27)
    s31 = np.uint64(31)
    s11 = np.uint64(11)
    k = 0
    draws = 0
    while k < count:
        state = state + golden
        x = state
        x = (x ^ (x >> s30)) * m1
        x = (x ^ (x >> s27)) * m2
        x = x ^ (x >> s31)
        u = float(x >> s11) * _TWO_M52 - 1.0
        state = state + golden
        x = state
        x = (x ^ (x >> s30)) * m1
        x = (x ^ (x >> s27)) * m2
        x = x ^ (x >> s31)
        v = float(x >> s11) * _TWO_M52 - 1.0
        draws += 2
        s = u * u + v * v
        if s <= 0.0 or s >= 1.0:
            continue
        f = math.sqrt(-2.0 * math.log(s) / s)
        out[k] = u * f
        k += 1
        if k < count:
            out[k] = v * f
            k += 1
    return draws


def standard_normals_numba(seed: int, count: int) -> np.ndarray:
    out = np.empty(count)
    _normals_seq(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), count, out)
    return out


def _splitmix_block(seed: int, start: int, size: int) -> np.ndarray:
    # draws start .. start+size-1 (0-based), as floats in [-1, 1)
    idx = np.arange(start + 1, start + size + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = np.uint64(seed) + idx * np.uint64(_GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(_M1)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(_M2)
    x = x ^ (x >> np.uint64(31))
    return (x >> np.uint64(11)).astype(np.float64) * _TWO_M52 - 1.0


def _libm_log(s: np.ndarray) -> np.ndarray:
    # np.log is SIMD-vectorised and can differ from libm by an ulp;
    # the compiled path calls libm, so use it here too
    return np.fromiter(map(math.log, s.tolist()), dtype=np.float64, count=len(s))


def standard_normals_numpy(seed: int, count: int) -> np.ndarray:
    seed &= 0xFFFFFFFFFFFFFFFF
    out = np.empty(count)
    filled = 0
    pos = 0
    while filled < count:
        pairs = max(64, int((count - filled) / 2 * 1.3) + 16)
        block = _splitmix_block(seed, pos, 2 * pairs)
        pos += 2 * pairs
        u, v = block[0::2], block[1::2]
        s = u * u + v * v
        ok = (s > 0.0) & (s < 1.0)
        u, v, s = u[ok], v[ok], s[ok]
        f = np.sqrt(-2.0 * _libm_log(s) / s)
        pair_out = np.empty(2 * len(s))
        pair_out[0::2] = u * f
        pair_out[1::2] = v * f
        take = min(len(pair_out), count - filled)
        out[filled : filled + take] = pair_out[:take]
        filled += take
    return out


def gauss_hermite(n: int, tol: float = 1e-14, backend: str | None = None):
    backend = backend or BACKEND
    if backend == "numba":
        return gauss_hermite_numba(n, tol)
    if backend == "numpy":
        return gauss_hermite_numpy(n, tol)
    raise ValueError(f"unknown backend {backend!r}")


def standard_normals(seed: int, count: int, backend: str | None = None) -> np.ndarray:
    backend = backend or BACKEND
    if backend == "numba":
        return standard_normals_numba(seed, count)
    if backend == "numpy":
        return standard_normals_numpy(seed, count)
    raise ValueError(f"unknown backend {backend!r}")
