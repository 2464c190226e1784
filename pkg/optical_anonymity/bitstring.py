"""Immutable bit strings

Bits are held as a Python integer plus an explicit length. Index 0 is the
leftmost bit as written ('1001101011'[0] == 1), which is the most significant
bit of the packed integer.
"""

from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np

from optical_anonymity.exceptions import LengthMismatchError


@dataclass(frozen=True, slots=True)
class BitString:
    """Fixed-length sequence of 0/1 values"""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"Negative bit string length: {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"Value does not fit in {self.length} bit(s)")

    # -----------------------------------------------------------------
    # Construction
    # -----------------------------------------------------------------

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        """Parse '0'/'1' characters; whitespace and underscores are ignored"""
        digits = "".join(ch for ch in text if not ch.isspace() and ch != "_")
        if any(ch not in "01" for ch in digits):
            raise ValueError(f"Not a binary string: {text!r}")
        return cls(int(digits, 2) if digits else 0, len(digits))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        value = 0
        length = 0
        for bit in bits:
            value = (value << 1) | (1 if bit else 0)
            length += 1
        return cls(value, length)

    @classmethod
    def from_hex(cls, text: str, length: int) -> "BitString":
        digits = "".join(text.split())
        value = int(digits, 16) if digits else 0
        return cls(value, length)

    @classmethod
    def from_bytes(cls, data: bytes, length: int | None = None) -> "BitString":
        """Big-endian bit order; keeps the first ``length`` bits"""
        total = 8 * len(data)
        if length is None:
            length = total
        if length > total:
            raise LengthMismatchError(f"{len(data)} byte(s) cannot supply {length} bits")
        return cls(int.from_bytes(data, "big") >> (total - length), length)

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(0, length)

    @classmethod
    def concat(cls, parts: Iterable["BitString"]) -> "BitString":
        value = 0
        length = 0
        for part in parts:
            value = (value << part.length) | part.value
            length += part.length
        return cls(value, length)

    # -----------------------------------------------------------------
    # Access
    # -----------------------------------------------------------------

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(f"Bit index {index} out of range for length {self.length}")
        return (self.value >> (self.length - 1 - index)) & 1

    def __iter__(self) -> Iterator[int]:
        for shift in range(self.length - 1, -1, -1):
            yield (self.value >> shift) & 1

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def __xor__(self, other: "BitString") -> "BitString":
        return self.xor(other)

    def xor(self, other: "BitString") -> "BitString":
        if self.length != other.length:
            raise LengthMismatchError(
                f"Cannot XOR bit strings of length {self.length} and {other.length}"
            )
        return BitString(self.value ^ other.value, self.length)

    def slice(self, start: int, stop: int) -> "BitString":
        """Bits [start, stop) as a new bit string"""
        start = max(0, start)
        stop = min(self.length, stop)
        if stop <= start:
            return BitString(0, 0)
        width = stop - start
        return BitString((self.value >> (self.length - stop)) & ((1 << width) - 1), width)

    def truncate(self, length: int) -> "BitString":
        return self.slice(0, length)

    def count_ones(self) -> int:
        return self.value.bit_count()

    def is_zero(self) -> bool:
        return self.value == 0

    def to_array(self) -> np.ndarray:
        """Unpacked uint8 array, one element per bit"""
        nbytes = (self.length + 7) // 8
        padded = self.value << (8 * nbytes - self.length)
        packed = np.frombuffer(padded.to_bytes(nbytes, "big"), dtype=np.uint8)
        return np.unpackbits(packed)[: self.length]

    def to_hex(self) -> str:
        width = (self.length + 3) // 4
        return format(self.value, f"0{width}x") if width else ""
