"""Closed-form space-efficiency numbers.

The memory-variance product (MVP) is the relative estimator variance
times the state size in bits; it is a size-independent constant per
configuration and estimator, so it is the natural figure of merit for
comparing sketches.  This module evaluates the closed forms for densely
bit-packed registers and derives the expected relative RMSE for a
concrete precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TheoryConfig:
    """(t, d) pair with the derived staircase base."""

    t: int
    d: int

    def __post_init__(self) -> None:
        if self.t < 0 or self.d < 0:
            raise ValueError(f"t and d must be >= 0, got t={self.t}, d={self.d}")

    @property
    def base(self) -> float:
        """Geometric base approximated by the update values: 2**(2**-t)."""
        return 2.0 ** (2.0 ** -self.t)

    @property
    def max_field_bits(self) -> int:
        """Bits for the register maximum, fixed at 6 + t for exa-scale range."""
        return 6 + self.t


def hurwitz_zeta(s: float, q: float) -> float:
    """sum((k + q)**-s for k >= 0) for s > 1, q > 0.

    Direct summation of the first terms plus an Euler-Maclaurin tail.
    The tail keeps the corrections through the second Bernoulli pair,
    which bounds the truncation error well below 1e-12 for s >= 2.
    """
    if s <= 1.0:
        raise ValueError(f"s must be > 1, got {s}")
    if q <= 0.0:
        raise ValueError(f"q must be > 0, got {q}")
    n = 64
    total = math.fsum((k + q) ** -s for k in range(n))
    x = n + q
    total += x ** (1.0 - s) / (s - 1.0)
    total += 0.5 * x ** -s
    total += s * x ** (-s - 1.0) / 12.0
    total -= s * (s + 1.0) * (s + 2.0) * x ** (-s - 3.0) / 720.0
    return total


def _tail_ratio(t: int, d: int) -> float:
    """b**-d / (b - 1) with b = 2**(2**-t); the recurring zeta offset."""
    cfg = TheoryConfig(t, d)
    return cfg.base ** -d / (cfg.base - 1.0)


def mvp_ml(t: int, d: int) -> float:
    """MVP of an efficient unbiased estimator on bit-packed registers.

    (6 + t + d) * ln(b) / zeta(2, 1 + b**-d / (b - 1)).
    """
    cfg = TheoryConfig(t, d)
    ln_b = math.ldexp(math.log(2.0), -t)
    return (cfg.max_field_bits + d) * ln_b / hurwitz_zeta(2.0, 1.0 + _tail_ratio(t, d))


def mvp_martingale(t: int, d: int) -> float:
    """MVP of the martingale estimator on bit-packed registers.

    (6 + t + d) * ln(b) / 2 * (1 + b**-d / (b - 1)).
    """
    cfg = TheoryConfig(t, d)
    ln_b = math.ldexp(math.log(2.0), -t)
    return (cfg.max_field_bits + d) * ln_b / 2.0 * (1.0 + _tail_ratio(t, d))


def theoretical_rmse(mvp: float, t: int, d: int, p: int) -> float:
    """Expected relative RMSE: sqrt(mvp / ((6 + t + d) * 2**p))."""
    return math.sqrt(mvp / ((6 + t + d) * (1 << p)))


def mvp_grid_argmin(
    kind: str,
    t_range: tuple[int, int] = (0, 3),
    d_range: tuple[int, int] = (0, 32),
) -> tuple[int, int, float]:
    """Grid minimum of an MVP closed form; returns (t, d, value)."""
    fn = {"ml": mvp_ml, "martingale": mvp_martingale}[kind]
    best = None
    for t in range(t_range[0], t_range[1] + 1):
        for d in range(d_range[0], d_range[1] + 1):
            value = fn(t, d)
            if best is None or value < best[2]:
                best = (t, d, value)
    assert best is not None
    return best
