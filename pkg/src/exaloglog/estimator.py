"""Distinct-count estimation from sketch states.

Two estimators are provided:

* Maximum-likelihood: the register states reduce, under the Poisson
  model, to a pair of coefficient families (a, b_k).  The ML equation in
  the transformed variable x = exp(n / (m * 2**kmax)) - 1 is strictly
  increasing and concave, so Newton's method from a bracketing starting
  point converges monotonically in a handful of iterations.  An optional
  first-order bias correction divides by (1 + c/m).

* Martingale: an online, unbiased estimator that grows by the inverse
  state-change probability at every state change.  It is the better
  choice when sketches never need to be merged.

All functions are pure except ``martingale_update`` /
``record_hashes``, which mutate a ``MartingaleState`` under the same
single-writer discipline as the sketch they follow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._bits import decode_hashes
from ._scalar import nu_scaled
from .backend import kernels
from .params import Params, rho, sigma
from .sketch import Sketch, UpdateOutcome, validate_register_values
from .theory import hurwitz_zeta

_MASK64 = (1 << 64) - 1

#: Hard cap on Newton iterations.  Convergence takes at most ~10 in
#: practice; hitting the cap is reported via ``MlSolution.capped``.
MAX_NEWTON_ITERATIONS = 64


@dataclass(frozen=True)
class Coefficients:
    """Summary (a, b) of the log-likelihood of a register or token state.

    ``a_scaled`` is a * 2**(64 - p), an integer accumulated with wrapping
    64-bit arithmetic: the all-zero state would need exactly 2**64, which
    wraps to 0, but that value is never consumed because estimation
    returns 0 early when every b_k is zero.  ``b[k]`` counts observed
    update values of probability 2**-k for k in [t + 1, 64 - p].
    """

    a_scaled: int
    b: np.ndarray
    p: int
    t: int

    @property
    def a(self) -> float:
        """Tail coefficient a = a_scaled / 2**(64 - p)."""
        return math.ldexp(self.a_scaled, self.p - 64)

    def b_range(self) -> tuple[int, int]:
        """Smallest and largest k with b[k] > 0, or (-1, -1) if none."""
        kmin = -1
        kmax = -1
        for k in range(self.t + 1, 64 - self.p + 1):
            if self.b[k] > 0:
                if kmin < 0:
                    kmin = k
                kmax = k
        return kmin, kmax


@dataclass(frozen=True)
class MlSolution:
    """Estimate plus solver diagnostics."""

    estimate: float
    iterations: int
    capped: bool
    root: float
    trajectory: tuple[float, ...]


@dataclass
class MartingaleState:
    """Running unbiased estimate and state-change probability.

    ``xi`` starts at 1 (the first insertion certainly changes the state)
    and only ever decreases; ``estimate`` only ever grows.
    """

    estimate: float = 0.0
    xi: float = 1.0


def coefficients_from_registers(values: np.ndarray, params: Params) -> Coefficients:
    """Log-likelihood coefficients of raw register values."""
    values = np.ascontiguousarray(values, dtype=np.uint64)
    a_scaled, b = kernels.coefficient_arrays(values, params.t, params.d, params.p)
    return Coefficients(int(a_scaled) & _MASK64, b, params.p, params.t)


def compute_coefficients(sketch: Sketch) -> Coefficients:
    """Log-likelihood coefficients of a sketch state."""
    return coefficients_from_registers(sketch.register_values(), sketch.params)


def solve_ml(coeffs: Coefficients, m: int) -> MlSolution:
    """Solve the ML equation for the distinct count.

    Returns 0 for the all-zero state and +inf for a saturated state
    (a = 0 with nonzero counts).  When only a single coefficient k is
    populated the root is available in closed form; otherwise Newton's
    method runs from a starting point that provably brackets the root
    from below, stopping at the first nonnegative residual or when an
    iterate fails to increase.
    """
    b = coeffs.b
    kmin, kmax = coeffs.b_range()
    if kmin < 0:
        return MlSolution(0.0, 0, False, 0.0, ())
    if coeffs.a_scaled == 0:
        return MlSolution(math.inf, 0, False, math.inf, ())

    beta_sum = 0.0
    beta_pow = 0.0
    for k in range(kmin, kmax + 1):
        beta_sum += float(b[k])
        beta_pow += float(b[k]) * math.ldexp(1.0, -k)
    beta_pow = math.ldexp(beta_pow, kmax)
    a_2k = math.ldexp(coeffs.a_scaled, coeffs.p - 64 + kmax)

    x = beta_pow / a_2k
    iterations = 0
    capped = False
    trajectory: list[float] = []
    if kmin < kmax:
        x = math.expm1(math.log1p(x) * (beta_sum / beta_pow))
        trajectory.append(x)
        while True:
            if iterations >= MAX_NEWTON_ITERATIONS:
                capped = True
                break
            # One shared sweep accumulates A (the ML-equation sum) and B
            # (the matching derivative sum) via the squaring recursions.
            phi = 1.0
            tau = 0.0
            y = x
            k = kmax
            total_a = float(b[kmax])
            total_b = 0.0
            while True:
                k -= 1
                z = 2.0 / (2.0 + y)
                phi *= z
                tau = tau * (2.0 - z) + (1.0 - z)
                total_a += float(b[k]) * phi
                total_b += float(b[k]) * phi * tau
                if k <= kmin:
                    break
                y = y * (y + 2.0)
            linear = a_2k * x
            if total_a <= linear:
                break
            iterations += 1
            x_old = x
            x = x * (1.0 + (total_a - linear) / (total_b + linear))
            trajectory.append(x)
            if x <= x_old:
                break
    estimate = m * math.ldexp(math.log1p(x), kmax)
    return MlSolution(estimate, iterations, capped, x, tuple(trajectory))


def bias_correction_constant(t: int, d: int) -> float:
    """First-order ML bias constant c; the correction divides by 1 + c/m."""
    if t < 0 or d < 0:
        raise ValueError(f"t and d must be >= 0, got t={t}, d={d}")
    base = 2.0 ** (2.0 ** -t)
    ratio = base ** -d / (base - 1.0)
    ln_b = math.ldexp(math.log(2.0), -t)
    q = 1.0 + ratio
    return ln_b * (1.0 + 2.0 * ratio) * hurwitz_zeta(3.0, q) / hurwitz_zeta(2.0, q) ** 2


def estimate_distinct(sketch: Sketch, bias_correction: bool = True) -> float:
    """ML distinct-count estimate of a sketch, bias-corrected by default."""
    params = sketch.params
    solution = solve_ml(compute_coefficients(sketch), params.m)
    if not bias_correction:
        return solution.estimate
    c = bias_correction_constant(params.t, params.d)
    return solution.estimate / (1.0 + c / params.m)


def _check_register(r: int, params: Params) -> None:
    validate_register_values(np.array([r], dtype=np.uint64), params)


def pmf_register(r: int, n: float, params: Params) -> float:
    """Probability of register value ``r`` after n distinct insertions.

    Poisson model with per-register rate n/m: the maximum k must have
    occurred, nothing above it may have occurred, and each indicator bit
    fixes whether its update value occurred.
    """
    if n < 0:
        raise ValueError(f"distinct count must be >= 0, got {n}")
    _check_register(r, params)
    d = params.d
    k = r >> d
    rate = n / params.m
    if k == 0:
        return math.exp(-rate)
    prob = -math.expm1(-rate * rho(k, params))
    prob *= math.exp(-rate * sigma(k, params))
    for j in range(1, min(d, k - 1) + 1):
        q = rate * rho(k - j, params)
        if (r >> (d - j)) & 1:
            prob *= -math.expm1(-q)
        else:
            prob *= math.exp(-q)
    return prob


def nu(r: int, params: Params) -> float:
    """Probability that the next new element changes register value ``r``.

    Strictly decreasing along any insertion path; 1/m for an empty
    register and 0 for a saturated one.
    """
    _check_register(r, params)
    return math.ldexp(nu_scaled(r, params.t, params.d, params.p), -params.p)


def state_change_probability(sketch: Sketch) -> float:
    """Probability xi that the next new element changes the sketch state.

    Recomputed from scratch as the sum of per-register change
    probabilities; the martingale estimator maintains the same quantity
    incrementally.
    """
    params = sketch.params
    scale = math.ldexp(1.0, -params.p)
    return math.fsum(
        nu_scaled(int(r), params.t, params.d, params.p) * scale
        for r in sketch.register_values()
    )


def martingale_update(
    state: MartingaleState, outcome: UpdateOutcome, params: Params
) -> MartingaleState:
    """Advance the martingale estimator for one state-changing insertion.

    The caller skips outcomes with ``changed == False``.  Mutates and
    returns ``state``.  Constant time.
    """
    state.estimate += 1.0 / state.xi
    delta = nu(outcome.old_value, params) - nu(outcome.new_value, params)
    state.xi -= delta
    if state.xi <= 0.0:
        raise RuntimeError(
            f"state-change probability dropped to {state.xi}; the martingale "
            f"state no longer matches its sketch"
        )
    return state


def record_hashes(
    sketch: Sketch, hashes, state: MartingaleState | None = None
) -> None:
    """Bulk-insert 64-bit hashes, optionally tracking a martingale state.

    Equivalent to inserting the hashes one by one and feeding every
    changed outcome to ``martingale_update``.
    """
    if state is None:
        sketch.insert_hashes(hashes)
        return
    hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
    if hashes.size == 0:
        return
    params = sketch.params
    idx, u = decode_hashes(hashes, params.t, params.p)
    values = sketch.register_values()
    state.estimate, state.xi = kernels.apply_updates_martingale(
        values, idx, u, params.t, params.d, params.p, state.estimate, state.xi
    )
    sketch._set_register_values(values)
