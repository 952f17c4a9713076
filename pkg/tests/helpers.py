"""Shared test oracles, independent of the library's computation paths."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from exaloglog.estimator import Coefficients
from exaloglog.params import Params


def random_hashes(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2 ** 64 - 1, size=n, dtype=np.uint64, endpoint=True)


def rho_fraction(u: int, params: Params) -> Fraction:
    """Exact update-value probability straight from its definition."""
    e = min(params.t + 1 + (u - 1) // (1 << params.t), 64 - params.p)
    return Fraction(1, 1 << e)


def sigma_brute(k: int, params: Params) -> Fraction:
    """Exact tail mass by direct summation."""
    return sum(
        (rho_fraction(u, params) for u in range(k + 1, params.u_max + 1)),
        Fraction(0),
    )


def reachable_registers(params: Params):
    """Enumerate every register value the update rule can produce.

    For 1 <= k <= d the low field always carries the shifted empty-state
    occurrence bit at position d - k; real indicator bits sit above it.
    """
    d = params.d
    yield 0
    for k in range(1, params.u_max + 1):
        if k <= d:
            carry = 1 << (d - k)
            for bits in range(1 << (k - 1)):
                yield (k << d) | (bits << (d - k + 1)) | carry
        else:
            for bits in range(1 << d):
                yield (k << d) | bits


def f_ml_direct(x: float, a_2k: float, b, kmin: int, kmax: int) -> float:
    """The ML equation evaluated term by term with expm1/log1p.

    Independent of the production solver's squaring recursions.
    """
    if x == 0.0:
        return -float(sum(b[kmin:kmax + 1]))
    total = a_2k * x
    lx = math.log1p(x)
    for j in range(kmax - kmin + 1):
        beta = float(b[kmax - j])
        if beta:
            arg = math.ldexp(lx, j)
            if arg > 700.0:
                continue  # the term underflows to zero
            total -= beta * math.ldexp(x, j) / math.expm1(arg)
    return total


def bisect_ml_root(a_2k: float, b, kmin: int, kmax: int) -> float:
    """Root of the ML equation by plain bisection on [0, beta_sum / a2k]."""
    beta_sum = float(sum(b[kmin:kmax + 1]))
    hi = beta_sum / a_2k
    while f_ml_direct(hi, a_2k, b, kmin, kmax) < 0:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f_ml_direct(mid, a_2k, b, kmin, kmax) < 0:
            lo = mid
        else:
            hi = mid
    return hi


def a_times_2k(coeffs: Coefficients, kmax: int) -> float:
    return math.ldexp(coeffs.a_scaled, coeffs.p - 64 + kmax)


def fuzz_coefficients(rng: np.random.Generator):
    """Random coefficient sets shaped like real sketch likelihoods."""
    p = int(rng.integers(2, 13))
    t = int(rng.integers(0, 4))
    lo, hi = t + 1, 64 - p
    m = 1 << p
    count = min(int(rng.integers(1, 7)), hi - lo + 1)
    ks = rng.choice(np.arange(lo, hi + 1), size=count, replace=False)
    b = np.zeros(65, dtype=np.int64)
    for k in ks:
        b[k] = int(rng.integers(1, m + 1))
    a_scaled = max(1, int(rng.random() * (m << (64 - p))))
    a_scaled = min(a_scaled, (1 << 64) - 1)
    return Coefficients(a_scaled, b, p, t), m


def random_small_params(rng: np.random.Generator, max_d: int = 12,
                        max_p: int = 6) -> Params:
    t = int(rng.integers(0, 4))
    d = int(rng.integers(0, max_d + 1))
    p = int(rng.integers(2, max_p + 1))
    return Params(t, d, p)
