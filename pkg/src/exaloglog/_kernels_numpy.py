"""Pure-numpy fallback kernels.

Same interface as ``_kernels_numba``.  Bulk recording is vectorized as a
scatter of per-register maxima and indicator bits followed by a register
merge, which yields the same state as stream-order insertion because the
data structure is order-independent.  The martingale variant cannot be
vectorized (every update couples through xi), so it falls back to the
scalar reference loop.
"""

from __future__ import annotations

import numpy as np

from ._scalar import nu_scaled, update_register

NAME = "numpy"

_ONE = np.uint64(1)
_MASK64 = (1 << 64) - 1


def merge_register_arrays(r: np.ndarray, r2: np.ndarray, d: int) -> np.ndarray:
    """Element-wise register merge; vector form of _scalar.merge_registers."""
    du = np.uint64(d)
    k = r >> du
    k2 = r2 >> du
    big = np.where(k >= k2, r, r2)
    small = np.where(k >= k2, r2, r)
    diff = np.where(k >= k2, k - k2, k2 - k)
    # Shifting by more than d+1 always yields zero; clamp to keep the
    # shift amount well-defined.
    sh = np.minimum(diff, np.uint64(d + 1))
    occupancy = ((_ONE << du) | (small & ((_ONE << du) - _ONE))) >> sh
    merged = big | occupancy
    plain_or = r | r2
    use_shift = (k != k2) & (np.minimum(k, k2) > 0)
    return np.where(use_shift, merged, plain_or)


def apply_updates(regs: np.ndarray, idx: np.ndarray, u: np.ndarray, d: int) -> None:
    """Record (register index, update value) pairs.

    Two scatter passes build the state the batch alone would produce; the
    result is merged into the existing registers.
    """
    du = np.uint64(d)
    kb = np.zeros_like(regs)
    np.maximum.at(kb, idx, u)
    bits = np.zeros_like(regs)
    diff = kb[idx] - u
    sel = (diff >= _ONE) & (diff <= du)
    if sel.any():
        np.bitwise_or.at(bits, idx[sel], _ONE << (du - diff[sel]))
    batch = (kb << du) | bits
    # Stream-order insertion into an empty register carries the implicit
    # empty-state occurrence bit along at position d - k while k <= d;
    # reproduce it so batch recording matches sequential recording.
    low = (kb >= _ONE) & (kb <= du)
    if low.any():
        batch[low] |= _ONE << (du - kb[low])
    regs[:] = merge_register_arrays(regs, batch, d)


def apply_updates_martingale(regs, idx, u, t, d, p, estimate, xi):
    """Sequential reference loop; see the numba backend for the fast path."""
    inv_m = 0.5 ** p
    for j in range(idx.size):
        i = int(idx[j])
        r = int(regs[i])
        new = update_register(r, int(u[j]), d)
        if new != r:
            estimate += 1.0 / xi
            xi -= (nu_scaled(r, t, d, p) - nu_scaled(new, t, d, p)) * inv_m
            regs[i] = new
    return estimate, xi


def coefficient_arrays(regs: np.ndarray, t: int, d: int, p: int):
    """Log-likelihood coefficients; see the numba backend docstring."""
    k = (regs >> np.uint64(d)).astype(np.int64)
    e = np.minimum(t + 1 + ((k - 1) >> t), 64 - p)
    num = (((1 - t + e) << t) - k).astype(np.uint64)
    a_terms = num << (64 - p - e).astype(np.uint64)
    a = int(a_terms.sum(dtype=np.uint64))
    b = np.zeros(65, dtype=np.int64)
    nonzero = k >= 1
    if nonzero.any():
        b += np.bincount(e[nonzero], minlength=65)[:65]
    if d > 0:
        j = np.arange(1, d + 1, dtype=np.int64)
        uu = k[:, None] - j[None, :]
        valid = uu >= 1
        bit = ((regs[:, None] >> (np.uint64(d) - j.astype(np.uint64))) & _ONE).astype(
            bool
        )
        eu = np.minimum(t + 1 + ((uu - 1) >> t), 64 - p)
        clear = valid & ~bit
        if clear.any():
            terms = _ONE << (64 - p - eu[clear]).astype(np.uint64)
            a += int(terms.sum(dtype=np.uint64))
        flagged = valid & bit
        if flagged.any():
            b += np.bincount(eu[flagged], minlength=65)[:65]
    return np.uint64(a & _MASK64), b
