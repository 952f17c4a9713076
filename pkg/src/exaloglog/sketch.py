"""The ExaLogLog sketch: insertion, merging, reduction, serialization.

A sketch is ``m = 2**p`` registers of ``6 + t + d`` bits, packed back to
back in a byte buffer.  Each register stores the maximum update value it
has seen in its upper ``6 + t`` bits and occurrence flags for the ``d``
next-smaller update values in its lower bits.  All operations take
64-bit hashes; hashing elements is the caller's concern (any function
with uniform, independent output bits works -- see ``Sketch.insert``).

Concurrency: a sketch is single-writer.  Concurrent inserts need
external exclusion; reads (estimation, serialization) may run
concurrently only while no writer is active.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._bits import decode_hashes
from ._kernels_numpy import merge_register_arrays
from ._scalar import decode_hash, merge_registers as _merge_scalar, update_register
from .backend import kernels
from .bitpack import PackedArray
from .params import Params

SERIAL_MAGIC = 0x58

_HASH_MASK = (1 << 64) - 1


class SketchFormatError(ValueError):
    """Raised when serialized sketch bytes are malformed."""


class IncompatibleParamsError(ValueError):
    """Raised when two sketches cannot be combined directly."""

    def __init__(self, field: str, left, right):
        super().__init__(
            f"sketches have incompatible parameter {field!r}: {left} vs {right}"
        )
        self.field = field


@dataclass(frozen=True)
class UpdateOutcome:
    """Result of a single insertion, consumed by the martingale estimator."""

    index: int
    old_value: int
    new_value: int
    changed: bool


def merge_registers(r: int, r2: int, d: int) -> int:
    """Merge two register values recorded with the same parameters.

    Commutative, associative, and idempotent; merging with 0 is the
    identity.  The result equals recording the union of the update values
    behind both registers.
    """
    return _merge_scalar(r, r2, d)


def validate_register_values(values: np.ndarray, params: Params) -> None:
    """Raise ValueError unless every register value is reachable.

    Reachable means: the maximum field does not exceed the largest
    possible update value, and an empty maximum implies an empty register.
    While the maximum k is still within the indicator range (k <= d), the
    update rule keeps shifting the empty register's implicit occurrence
    bit along, so such registers carry exactly one set bit at position
    d - k and nothing below it.  That bit references no real update value
    and is ignored by estimation, but it is part of every reachable state
    and must survive serialization and merging bit for bit.
    """
    values = np.asarray(values, dtype=np.uint64)
    d = params.d
    k = (values >> np.uint64(d)).astype(np.int64)
    if (k > params.u_max).any():
        raise ValueError("register maximum exceeds the largest update value")
    if (values[k == 0] != 0).any():
        raise ValueError("register with zero maximum has indicator bits set")
    low = (k >= 1) & (k <= d)
    if low.any():
        width = (d - k[low] + 1).astype(np.uint64)
        field = values[low] & ((np.uint64(1) << width) - np.uint64(1))
        carry = np.uint64(1) << (width - np.uint64(1))
        if (field != carry).any():
            raise ValueError(
                "low indicator bits must hold exactly the carried "
                "empty-state occurrence bit"
            )


class Sketch:
    """Mutable distinct-counting state over 64-bit hashes."""

    __slots__ = ("params", "_regs")

    def __init__(self, params: Params, _registers: PackedArray | None = None):
        self.params = params
        if _registers is None:
            _registers = PackedArray(params.register_bits, params.m)
        self._regs = _registers

    # -- insertion ---------------------------------------------------------

    def insert_hash(self, h: int) -> UpdateOutcome:
        """Insert an element given its 64-bit hash.  Constant time.

        Idempotent: re-inserting the same hash never changes the state.
        """
        h &= _HASH_MASK
        params = self.params
        idx, u = decode_hash(h, params.t, params.p)
        old = self._regs.get(idx)
        new = update_register(old, u, params.d)
        if new != old:
            self._regs.set(idx, new)
        return UpdateOutcome(idx, old, new, new != old)

    def insert(self, element: bytes, hasher: Callable[[bytes], int]) -> UpdateOutcome:
        """Insert an element using a caller-supplied 64-bit hash function."""
        return self.insert_hash(hasher(element))

    def insert_hashes(self, hashes) -> None:
        """Bulk insertion of an array of 64-bit hashes (hot path)."""
        hashes = np.ascontiguousarray(hashes, dtype=np.uint64)
        if hashes.size == 0:
            return
        params = self.params
        idx, u = decode_hashes(hashes, params.t, params.p)
        values = self.register_values()
        kernels.apply_updates(values, idx, u, params.d)
        self._set_register_values(values)

    # -- register access ---------------------------------------------------

    def register_values(self) -> np.ndarray:
        """Unpacked copy of all register values as uint64."""
        return self._regs.to_ints()

    def _set_register_values(self, values: np.ndarray) -> None:
        self._regs = PackedArray.from_ints(self.params.register_bits, values)

    def check_invariants(self) -> None:
        """Validate every register value; raises ValueError on corruption."""
        validate_register_values(self.register_values(), self.params)

    def is_empty(self) -> bool:
        return not self._regs.data.any()

    # -- merge / reduce ----------------------------------------------------

    def merge(self, other: "Sketch") -> "Sketch":
        """Combine two sketches recorded with identical parameters.

        The result equals recording the union of both input streams.  For
        sketches that differ in d or p (same t), reduce both to the common
        parameters first.
        """
        for field in ("t", "d", "p"):
            mine = getattr(self.params, field)
            theirs = getattr(other.params, field)
            if mine != theirs:
                raise IncompatibleParamsError(field, mine, theirs)
        values = merge_register_arrays(
            self.register_values(), other.register_values(), self.params.d
        )
        out = Sketch(self.params)
        out._set_register_values(values)
        return out

    def reduce(self, d_new: int, p_new: int) -> "Sketch":
        """Losslessly shrink to parameters (t, d_new, p_new).

        The result is identical to recording the original element stream
        directly at the smaller parameters.  Groups of 2**(p - p_new)
        registers collapse into one; registers whose maximum was capped by
        the leading-zero limit are re-based first, because the cap moves
        when index bits are returned to the leading-zero range.
        """
        params = self.params
        t, d, p = params.t, params.d, params.p
        if not 0 <= d_new <= d:
            raise ValueError(f"d' must be in [0, {d}], got {d_new}")
        if not 2 <= p_new <= p:
            raise ValueError(f"p' must be in [2, {p}], got {p_new}")
        target = Params(t, d_new, p_new, allow_wide_t=True)
        src = self.register_values()
        m_new = target.m
        threshold = ((64 - t - p) << t) + 1
        out_values = np.zeros(m_new, dtype=np.uint64)
        for i in range(m_new):
            acc = 0
            for j in range(1 << (p - p_new)):
                r = int(src[i + (j << p_new)]) >> (d - d_new)
                k = r >> d_new
                if k >= threshold:
                    nlz_j = 64 - j.bit_length()
                    shift = ((p - p_new) - (64 - nlz_j)) << t
                    if shift > 0:
                        nbits = d_new + threshold - k
                        if nbits > 0:
                            keep = (r >> nbits) << nbits
                            r = keep | ((r & ((1 << nbits) - 1)) >> shift)
                        r += shift << d_new
                acc = merge_registers(r, acc, d_new)
            out_values[i] = acc
        out = Sketch(target)
        out._set_register_values(out_values)
        return out

    # -- serialization -----------------------------------------------------

    def serialize(self) -> bytes:
        """Bit-exact wire format: magic, t, d, p, packed registers."""
        params = self.params
        header = bytes((SERIAL_MAGIC, params.t, params.d, params.p))
        return header + self._regs.tobytes()

    @classmethod
    def deserialize(cls, data: bytes) -> "Sketch":
        if len(data) < 4:
            raise SketchFormatError("sketch data shorter than the 4-byte header")
        if data[0] != SERIAL_MAGIC:
            raise SketchFormatError(
                f"bad magic byte 0x{data[0]:02X}, expected 0x{SERIAL_MAGIC:02X}"
            )
        t, d, p = data[1], data[2], data[3]
        try:
            params = Params(t, d, p, allow_wide_t=True)
        except ValueError as exc:
            raise SketchFormatError(f"invalid parameters in header: {exc}") from exc
        expected = (params.m * params.register_bits + 7) // 8
        payload = data[4:]
        if len(payload) != expected:
            raise SketchFormatError(
                f"expected {expected} payload bytes, got {len(payload)}"
            )
        regs = PackedArray(
            params.register_bits, params.m, np.frombuffer(payload, dtype=np.uint8)
        )
        values = regs.to_ints()
        try:
            validate_register_values(values, params)
        except ValueError as exc:
            raise SketchFormatError(f"invalid register values: {exc}") from exc
        return cls(params, regs)

    # -- misc ----------------------------------------------------------------

    def copy(self) -> "Sketch":
        return Sketch(self.params, self._regs.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Sketch):
            return NotImplemented
        return self.params == other.params and self._regs == other._regs

    def __repr__(self) -> str:
        return f"Sketch(t={self.params.t}, d={self.params.d}, p={self.params.p})"


def record(params: Params, hashes) -> Sketch:
    """Record a batch of 64-bit hashes into a fresh sketch."""
    sketch = Sketch(params)
    sketch.insert_hashes(np.fromiter(hashes, dtype=np.uint64)
                         if not isinstance(hashes, np.ndarray) else hashes)
    return sketch
