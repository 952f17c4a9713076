"""Sketch parameters and the update-value distribution.

An ExaLogLog sketch is configured by three integers:

* ``t`` -- extra hash bits mixed into each update value.  The update
  values follow a staircase distribution that approximates a geometric
  distribution with base ``2**(2**-t)``; larger ``t`` means a finer
  staircase.  The register field holding the maximum update value takes
  ``6 + t`` bits so the sketch keeps working up to ~2**64 distinct
  elements.
* ``d`` -- indicator bits per register, flagging occurrences of the
  ``d`` update values directly below the register maximum.
* ``p`` -- precision; the sketch has ``m = 2**p`` registers.

The recommended configuration for maximum-likelihood estimation is
``t=2, d=20``; for martingale estimation ``t=2, d=16``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

#: Largest t accepted without an explicit override.  Wider values blow up
#: the register size without improving space efficiency.
MAX_DEFAULT_T = 3


@dataclass(frozen=True)
class Params:
    """Validated (t, d, p) triple with derived sizes."""

    t: int
    d: int
    p: int
    #: Accept t > MAX_DEFAULT_T.  Such configurations are legal but not
    #: useful in practice, so they must be requested explicitly.
    allow_wide_t: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("t", "d", "p"):
            value = getattr(self, name)
            if not isinstance(value, int):
                raise TypeError(f"{name} must be an integer, got {value!r}")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")
        if self.d < 0:
            raise ValueError(f"d must be >= 0, got {self.d}")
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if self.p + self.t > 63:
            raise ValueError(
                f"p + t must be <= 63 so index and value bits fit a 64-bit "
                f"hash, got p={self.p}, t={self.t}"
            )
        if self.t > MAX_DEFAULT_T and not self.allow_wide_t:
            raise ValueError(
                f"t={self.t} is not useful in practice; pass "
                f"allow_wide_t=True to use it anyway"
            )
        if self.register_bits > 64:
            raise ValueError(
                f"register width 6 + t + d = {self.register_bits} exceeds "
                f"64 bits (t={self.t}, d={self.d})"
            )

    @property
    def m(self) -> int:
        """Number of registers."""
        return 1 << self.p

    @property
    def register_bits(self) -> int:
        """Bits per register: 6 + t for the maximum plus d indicators."""
        return 6 + self.t + self.d

    @property
    def u_max(self) -> int:
        """Largest possible update value, (65 - p - t) * 2**t."""
        return (65 - self.p - self.t) << self.t

    @property
    def register_cap(self) -> int:
        """Largest legal register value."""
        return (self.u_max << self.d) + (1 << self.d) - 1


def exponent_raw(u: int, t: int, p: int) -> int:
    """Exponent e(u) = min(t + 1 + floor((u-1) / 2**t), 64 - p).

    Defined for u >= 1; evaluating the same expression at u = 0 yields t,
    which makes sigma(0) = 1 without a special case.
    """
    return min(t + 1 + ((u - 1) >> t), 64 - p)


def exponent(u: int, params: Params) -> int:
    """Exponent of the update-value probability: rho(u) = 2**-e(u)."""
    return exponent_raw(u, params.t, params.p)


def rho(u: int, params: Params) -> float:
    """Probability that an insertion produces update value ``u``.

    Always an exact power of two, so the returned float is exact.
    """
    if not 1 <= u <= params.u_max:
        raise ValueError(f"update value must be in [1, {params.u_max}], got {u}")
    return math.ldexp(1.0, -exponent(u, params))


def sigma(k: int, params: Params) -> float:
    """Tail mass sum(rho(u) for u in (k, u_max]) in closed form.

    sigma(0) = 1 and sigma(u_max) = 0.  The numerator is a small integer,
    so the result is exact in binary floating point.
    """
    if not 0 <= k <= params.u_max:
        raise ValueError(f"max update value must be in [0, {params.u_max}], got {k}")
    e = exponent_raw(k, params.t, params.p)
    numerator = ((1 - params.t + e) << params.t) - k
    return math.ldexp(float(numerator), -e)
