"""JIT-compiled hot kernels.

These loops dominate the runtime of bulk recording and of the simulation
harness.  They mirror the scalar reference code in ``_scalar`` statement
for statement; ``_kernels_numpy`` provides the same interface without a
numba dependency.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

#: Exact negative powers of two, indexed by exponent.
_POW2NEG = 0.5 ** np.arange(65, dtype=np.float64)

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _updated(r, u, d):
    """Apply update value u (int64) to register r (uint64)."""
    one = np.uint64(1)
    du = np.uint64(d)
    k = np.int64(r >> du)
    if u > k:
        delta = u - k
        if delta > d:
            return np.uint64(u) << du
        return (np.uint64(u) << du) | (
            ((one << du) | (r & ((one << du) - one))) >> np.uint64(delta)
        )
    if u < k and k - u <= d:
        return r | (one << np.uint64(d - (k - u)))
    return r


@njit(**_JIT)
def apply_updates(regs, idx, u, d):
    """Record (register index, update value) pairs in stream order."""
    for j in range(idx.size):
        i = np.int64(idx[j])
        regs[i] = _updated(regs[i], np.int64(u[j]), d)


@njit(**_JIT)
def _nu_scaled(r, t, d, p):
    """m * (state-change probability of register r); see _scalar.nu_scaled."""
    du = np.uint64(d)
    k = np.int64(r >> du)
    e = min(t + 1 + ((k - 1) >> t), 64 - p)
    total = float(((1 - t + e) << t) - k) * _POW2NEG[e]
    lo = k - d
    if lo < 1:
        lo = 1
    for uu in range(lo, k):
        if (r >> np.uint64(d - (k - uu))) & np.uint64(1) == np.uint64(0):
            eu = min(t + 1 + ((uu - 1) >> t), 64 - p)
            total += _POW2NEG[eu]
    return total


@njit(**_JIT)
def apply_updates_martingale(regs, idx, u, t, d, p, estimate, xi):
    """Record update pairs while maintaining the martingale estimator.

    Returns the updated (estimate, xi).  The estimate grows by 1/xi at
    every state change, after which xi drops by the change in the summed
    per-register change probabilities.
    """
    inv_m = _POW2NEG[p]
    for j in range(idx.size):
        i = np.int64(idx[j])
        r = regs[i]
        new = _updated(r, np.int64(u[j]), d)
        if new != r:
            estimate += 1.0 / xi
            xi -= (_nu_scaled(r, t, d, p) - _nu_scaled(new, t, d, p)) * inv_m
            regs[i] = new
    return estimate, xi


@njit(**_JIT)
def coefficient_arrays(regs, t, d, p):
    """Log-likelihood coefficients of a register array.

    Returns (a_scaled, b) where a_scaled is the tail coefficient times
    2**(64-p), accumulated in wrapping uint64 arithmetic, and b[j] counts
    observed update values with probability 2**-j.
    """
    a = np.uint64(0)
    b = np.zeros(65, dtype=np.int64)
    du = np.uint64(d)
    one = np.uint64(1)
    for i in range(regs.size):
        r = regs[i]
        k = np.int64(r >> du)
        e = min(t + 1 + ((k - 1) >> t), 64 - p)
        num = ((1 - t + e) << t) - k
        a += np.uint64(num) << np.uint64(64 - p - e)
        if k >= 1:
            b[e] += 1
            lo = k - d
            if lo < 1:
                lo = 1
            for uu in range(lo, k):
                eu = min(t + 1 + ((uu - 1) >> t), 64 - p)
                if (r >> np.uint64(d - (k - uu))) & one == np.uint64(0):
                    a += one << np.uint64(64 - p - eu)
                else:
                    b[eu] += 1
    return a, b
