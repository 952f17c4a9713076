"""Fixed-width values packed back to back into a byte buffer.

Registers are stored at exactly their nominal width -- no per-register
padding -- so a sketch with m registers of w bits occupies ceil(m*w/8)
bytes, matching the data structure's space accounting.  Value ``i``
occupies bits ``[i*w, (i+1)*w)`` of the bitstream, least significant bit
first; bit ``j`` of the stream is bit ``j % 8`` of byte ``j // 8``.
Values freely straddle byte boundaries.
"""

from __future__ import annotations

import numpy as np


class PackedArray:
    """Array of ``count`` unsigned ``width``-bit values, 1 <= width <= 64."""

    __slots__ = ("width", "count", "data")

    def __init__(self, width: int, count: int, data: np.ndarray | None = None):
        if not 1 <= width <= 64:
            raise ValueError(f"width must be in [1, 64], got {width}")
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        nbytes = (count * width + 7) // 8
        if data is None:
            data = np.zeros(nbytes, dtype=np.uint8)
        else:
            data = np.array(data, dtype=np.uint8, copy=True)
            if data.size != nbytes:
                raise ValueError(
                    f"expected {nbytes} payload bytes for {count} values of "
                    f"{width} bits, got {data.size}"
                )
        self.width = width
        self.count = count
        self.data = data

    def __len__(self) -> int:
        return self.count

    def get(self, i: int) -> int:
        if not 0 <= i < self.count:
            raise IndexError(i)
        first_bit = i * self.width
        b0 = first_bit >> 3
        b1 = (first_bit + self.width + 7) >> 3
        word = int.from_bytes(self.data[b0:b1].tobytes(), "little")
        return (word >> (first_bit & 7)) & ((1 << self.width) - 1)

    def set(self, i: int, value: int) -> None:
        if not 0 <= i < self.count:
            raise IndexError(i)
        mask = (1 << self.width) - 1
        if not 0 <= value <= mask:
            raise ValueError(f"value {value} does not fit in {self.width} bits")
        first_bit = i * self.width
        b0 = first_bit >> 3
        b1 = (first_bit + self.width + 7) >> 3
        shift = first_bit & 7
        word = int.from_bytes(self.data[b0:b1].tobytes(), "little")
        word = (word & ~(mask << shift)) | (value << shift)
        self.data[b0:b1] = np.frombuffer(
            word.to_bytes(b1 - b0, "little"), dtype=np.uint8
        )

    def to_ints(self) -> np.ndarray:
        """Unpack all values into a uint64 array."""
        bits = np.unpackbits(self.data, bitorder="little")[: self.count * self.width]
        if self.count == 0:
            return np.zeros(0, dtype=np.uint64)
        bits = bits.reshape(self.count, self.width).astype(np.uint64)
        weights = np.uint64(1) << np.arange(self.width, dtype=np.uint64)
        return (bits * weights).sum(axis=1, dtype=np.uint64)

    @classmethod
    def from_ints(cls, width: int, values: np.ndarray) -> "PackedArray":
        """Pack a sequence of unsigned values at the given width."""
        values = np.asarray(values, dtype=np.uint64)
        count = values.size
        out = cls(width, count)
        if count == 0:
            return out
        if width < 64 and (values >> np.uint64(width)).any():
            raise ValueError(f"some values do not fit in {width} bits")
        shifts = np.arange(width, dtype=np.uint64)
        bits = ((values[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)
        bits = bits.reshape(-1)
        pad = (-bits.size) % 8
        if pad:
            bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
        out.data = np.packbits(bits, bitorder="little")
        return out

    def tobytes(self) -> bytes:
        return self.data.tobytes()

    def copy(self) -> "PackedArray":
        return PackedArray(self.width, self.count, self.data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PackedArray):
            return NotImplemented
        return (
            self.width == other.width
            and self.count == other.count
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"PackedArray(width={self.width}, count={self.count})"
