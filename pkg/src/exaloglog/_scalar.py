"""Scalar register arithmetic shared by the public API and the numpy backend.

These are plain-int reference implementations of the per-register
operations.  The numba kernels mirror them statement for statement so
that both backends produce identical register states and identical
floating-point martingale values.
"""

from __future__ import annotations

import math

from .params import exponent_raw


def update_register(r: int, u: int, d: int) -> int:
    """Apply update value ``u`` to register value ``r``.

    A register is ``k * 2**d + bits`` where ``k`` is the maximum update
    value seen and bit ``d - j`` flags an occurrence of ``k - j``.  A new
    maximum shifts the old occupancy (with the old maximum prepended as an
    implicit occurrence) into the indicator field; a smaller value within
    the window sets its indicator bit; anything older is dropped.
    """
    k = r >> d
    if u > k:
        delta = u - k
        if delta > d:
            return u << d
        return (u << d) | (((1 << d) | (r & ((1 << d) - 1))) >> delta)
    if u < k and k - u <= d:
        return r | (1 << (d - (k - u)))
    return r


def merge_registers(r: int, r2: int, d: int) -> int:
    """Merge two register values recorded with the same parameters.

    The larger maximum wins; the smaller register's occupancy (its maximum
    acting as an implicit occurrence bit) is shifted into place and OR-ed
    in.  Equal maxima, or either register empty, reduce to a bitwise OR.
    """
    k = r >> d
    k2 = r2 >> d
    if k > k2 and k2 > 0:
        return r | (((1 << d) | (r2 & ((1 << d) - 1))) >> (k - k2))
    if k2 > k and k > 0:
        return r2 | (((1 << d) | (r & ((1 << d) - 1))) >> (k2 - k))
    return r | r2


def nu_scaled(r: int, t: int, d: int, p: int) -> float:
    """m times the probability that a new element changes register ``r``.

    Sum of the tail mass above the register maximum plus the probabilities
    of all update values in the indicator window whose bit is still clear.
    Terms are accumulated in ascending update-value order; the kernels use
    the same order so the floats agree bit for bit.
    """
    k = r >> d
    e = exponent_raw(k, t, p)
    total = math.ldexp(float(((1 - t + e) << t) - k), -e)
    for u in range(max(1, k - d), k):
        if (r >> (d - (k - u))) & 1 == 0:
            total += math.ldexp(1.0, -exponent_raw(u, t, p))
    return total


def decode_hash(h: int, t: int, p: int) -> tuple[int, int]:
    """Split a 64-bit hash into (register index, update value)."""
    idx = (h >> t) & ((1 << p) - 1)
    masked = h | ((1 << (p + t)) - 1)
    nlz = 64 - masked.bit_length()
    u = (nlz << t) + (h & ((1 << t) - 1)) + 1
    return idx, u
