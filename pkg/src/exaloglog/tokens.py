"""Sparse mode: hash tokens.

Before allocating a full register array it is cheaper to keep the raw
observations.  A 64-bit hash can be reduced to an (r + 6)-bit token that
preserves everything any sketch with ``p + t <= r`` needs: the low ``r``
hash bits plus the leading-zero count of the hash with those bits forced
to one.  Distinct tokens can be collected, deduplicated, turned back
into representative hashes for dense-mode insertion, or used directly
for ML estimation.  When and whether to convert to a sketch is the
caller's policy; this module only provides the mechanics.

With ``r <= 26`` a token fits 32 bits, so token sets are kept as sorted
unique uint32 arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._bits import nlz64
from .estimator import Coefficients, MlSolution, solve_ml

SERIAL_MAGIC = 0x54

MAX_R = 26
_MASK64 = (1 << 64) - 1


class TokenFormatError(ValueError):
    """Raised when serialized token-set bytes are malformed."""


def _check_r(r: int) -> None:
    if not 1 <= r <= MAX_R:
        raise ValueError(f"token parameter r must be in [1, {MAX_R}], got {r}")


def to_token(h: int, r: int) -> int:
    """Reduce a 64-bit hash to its (r + 6)-bit token."""
    _check_r(r)
    h &= _MASK64
    masked = h | ((1 << r) - 1)
    nlz = 64 - masked.bit_length()
    return ((h & ((1 << r) - 1)) << 6) + nlz


def from_token(token: int, r: int) -> int:
    """Representative 64-bit hash of a token.

    Inserting the result touches the same register with the same update
    value as the original hash, for every sketch with p + t <= r.  The
    leading term 2**(64 - nlz) is taken mod 2**64, which also covers the
    nlz = 0 case.
    """
    validate_token(token, r)
    nlz = token & 63
    return ((1 << (64 - nlz)) - (1 << r) + (token >> 6)) & _MASK64


def validate_token(token: int, r: int) -> None:
    """Raise ValueError unless ``token`` is reachable for parameter r."""
    _check_r(r)
    if not 0 <= token < (1 << (r + 6)):
        raise ValueError(f"token {token} out of range for r={r}")
    if (token & 63) > 64 - r:
        raise ValueError(
            f"token {token} has impossible leading-zero field {token & 63} "
            f"(max {64 - r} for r={r})"
        )


def to_tokens(hashes: np.ndarray, r: int) -> np.ndarray:
    """Vectorized hash-to-token conversion (uint32 output)."""
    _check_r(r)
    hashes = np.asarray(hashes, dtype=np.uint64)
    low_mask = np.uint64((1 << r) - 1)
    nlz = nlz64(hashes | low_mask).astype(np.uint64)
    tokens = ((hashes & low_mask) << np.uint64(6)) + nlz
    return tokens.astype(np.uint32)


def from_tokens(tokens: np.ndarray, r: int) -> np.ndarray:
    """Vectorized token-to-hash reconstruction (uint64 output)."""
    _check_r(r)
    tokens = np.asarray(tokens, dtype=np.uint64)
    nlz = tokens & np.uint64(63)
    # 1 << 64 wraps to 0 == 2**64 mod 2**64, which is what the subtraction
    # needs; keep the shift in range by special-casing nlz == 0.
    lead = np.where(
        nlz == 0, np.uint64(0), np.uint64(1) << (np.uint64(64) - nlz)
    )
    return lead - np.uint64(1 << r) + (tokens >> np.uint64(6))


def token_pmf(token: int, r: int) -> float:
    """Probability of observing ``token`` for a random 64-bit hash."""
    _check_r(r)
    if not 0 <= token < (1 << (r + 6)):
        raise ValueError(f"token {token} out of range for r={r}")
    nlz = token & 63
    if nlz > 64 - r:
        return 0.0
    return math.ldexp(1.0, -min(r + 1 + nlz, 64))


@dataclass
class TokenSet:
    """Deduplicated collection of hash tokens for a fixed r.

    The canonical representation is the ascending unique uint32 array.
    Single-writer, like a sketch; estimation is a pure read.
    """

    r: int
    tokens: np.ndarray = field(
        default_factory=lambda: np.zeros(0, dtype=np.uint32)
    )

    def __post_init__(self) -> None:
        _check_r(self.r)
        tokens = np.unique(np.asarray(self.tokens, dtype=np.uint32))
        if tokens.size:
            self._validate(tokens)
        self.tokens = tokens

    def _validate(self, tokens: np.ndarray) -> None:
        if int(tokens[-1]) >= (1 << (self.r + 6)):
            raise ValueError(f"token out of range for r={self.r}")
        if ((tokens & np.uint32(63)) > 64 - self.r).any():
            raise ValueError("token with impossible leading-zero field")

    def __len__(self) -> int:
        return int(self.tokens.size)

    def add_tokens(self, tokens: np.ndarray) -> None:
        tokens = np.asarray(tokens, dtype=np.uint32)
        if tokens.size == 0:
            return
        self._validate(np.sort(tokens))
        self.tokens = np.union1d(self.tokens, tokens)

    def add_hashes(self, hashes: np.ndarray) -> None:
        self.add_tokens(to_tokens(hashes, self.r))

    def add_hash(self, h: int) -> None:
        self.add_tokens(np.array([to_token(h, self.r)], dtype=np.uint32))

    def to_hashes(self) -> np.ndarray:
        """Representative 64-bit hashes, ready for dense-mode insertion."""
        return from_tokens(self.tokens, self.r)

    def union(self, other: "TokenSet") -> "TokenSet":
        if self.r != other.r:
            raise ValueError(f"token parameters differ: {self.r} vs {other.r}")
        return TokenSet(self.r, np.union1d(self.tokens, other.tokens))

    def serialize(self) -> bytes:
        header = bytes((SERIAL_MAGIC, self.r))
        count = len(self).to_bytes(4, "little")
        return header + count + self.tokens.astype("<u4").tobytes()

    @classmethod
    def deserialize(cls, data: bytes) -> "TokenSet":
        if len(data) < 6:
            raise TokenFormatError("token data shorter than the 6-byte header")
        if data[0] != SERIAL_MAGIC:
            raise TokenFormatError(
                f"bad magic byte 0x{data[0]:02X}, expected 0x{SERIAL_MAGIC:02X}"
            )
        r = data[1]
        count = int.from_bytes(data[2:6], "little")
        payload = data[6:]
        if len(payload) != 4 * count:
            raise TokenFormatError(
                f"expected {4 * count} token bytes, got {len(payload)}"
            )
        tokens = np.frombuffer(payload, dtype="<u4").astype(np.uint32)
        if count > 1 and not (tokens[1:] > tokens[:-1]).all():
            raise TokenFormatError("tokens must be strictly ascending")
        try:
            return cls(r, tokens)
        except ValueError as exc:
            raise TokenFormatError(str(exc)) from exc


def token_coefficients(token_set: TokenSet) -> Coefficients:
    """Log-likelihood coefficients of a token set.

    The token likelihood has the same shape as a register likelihood with
    a single register (p = 0) and t = r, so the same solver applies with
    m = 1.  a_scaled starts at 2**64 (wrapping to 0) and loses 2**(64-j)
    per token.
    """
    r = token_set.r
    j = np.minimum(
        r + 1 + (token_set.tokens & np.uint32(63)).astype(np.int64), 64
    )
    b = np.bincount(j, minlength=65)[:65].astype(np.int64)
    drained = 0
    if j.size:
        terms = np.uint64(1) << (np.uint64(64) - j.astype(np.uint64))
        drained = int(terms.sum(dtype=np.uint64))
    a_scaled = ((1 << 64) - drained) & _MASK64
    return Coefficients(a_scaled, b, 0, r)


def solve_tokens(token_set: TokenSet) -> MlSolution:
    """ML solution for a token set (single-likelihood, m = 1)."""
    return solve_ml(token_coefficients(token_set), 1)


def estimate_from_tokens(token_set: TokenSet) -> float:
    """ML distinct-count estimate from collected tokens.

    No bias correction: the first-order correction is derived for an
    m-register state and does not apply to the single token likelihood.
    """
    return solve_tokens(token_set).estimate
