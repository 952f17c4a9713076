"""Vectorized 64-bit helpers used by both kernel backends."""

from __future__ import annotations

import numpy as np

_U32_MASK = np.uint64(0xFFFFFFFF)
_U64_ONE = np.uint64(1)


def bit_length64(x: np.ndarray) -> np.ndarray:
    """Exact bit length of each uint64 element (0 for 0).

    Works on 32-bit halves converted to float64 (values < 2**32 convert
    exactly) and reads the exponent via frexp, which never rounds.
    """
    x = np.asarray(x, dtype=np.uint64)
    hi = (x >> np.uint64(32)).astype(np.float64)
    lo = (x & _U32_MASK).astype(np.float64)
    _, ehi = np.frexp(hi)
    _, elo = np.frexp(lo)
    return np.where(hi > 0.0, ehi.astype(np.int64) + 32, elo.astype(np.int64))


def nlz64(x: np.ndarray) -> np.ndarray:
    """Number of leading zeros of each uint64 element (64 for 0)."""
    return 64 - bit_length64(x)


def decode_hashes(hashes: np.ndarray, t: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized split of 64-bit hashes into (register index, update value).

    Matches ``_scalar.decode_hash``: low ``t`` bits feed the update value,
    the next ``p`` bits select the register, and the leading-zero count of
    the hash with its low ``p + t`` bits forced to one supplies the
    staircase level.
    """
    hashes = np.asarray(hashes, dtype=np.uint64)
    idx = (hashes >> np.uint64(t)) & np.uint64((1 << p) - 1)
    masked = hashes | np.uint64((1 << (p + t)) - 1)
    nlz = nlz64(masked).astype(np.uint64)
    u = (nlz << np.uint64(t)) + (hashes & np.uint64((1 << t) - 1)) + _U64_ONE
    return idx, u
