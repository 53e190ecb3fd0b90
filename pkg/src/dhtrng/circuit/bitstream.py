"""Packed bit sequences and their on-disk formats.

Bits are packed LSB-first: the first generated bit is bit 0 of byte 0.
``.bin`` files hold the packed bytes, ``.txt`` files one ASCII '0'/'1' per
bit with no separators.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


class BitStream:
    __slots__ = ("_packed", "_length", "_bits")

    def __init__(self, packed: bytes | np.ndarray, length_bits: int):
        packed = np.frombuffer(bytes(packed), dtype=np.uint8) if isinstance(packed, (bytes, bytearray)) \
            else np.ascontiguousarray(packed, dtype=np.uint8)
        if length_bits < 0 or len(packed) != (length_bits + 7) // 8:
            raise ValueError(f"{len(packed)} bytes cannot hold exactly {length_bits} bits")
        self._packed = packed
        self._length = int(length_bits)
        self._bits = None

    @classmethod
    def from_bits(cls, bits) -> "BitStream":
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        arr = arr.astype(np.uint8, copy=False)
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        return cls(np.packbits(arr, bitorder="little"), arr.size)

    @classmethod
    def from_text(cls, text: str) -> "BitStream":
        text = "".join(text.split())
        raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
        if raw.size and not np.all((raw == ord("0")) | (raw == ord("1"))):
            raise ValueError("text streams may contain only '0' and '1'")
        return cls.from_bits(raw - ord("0"))

    @classmethod
    def read(cls, path) -> "BitStream":
        path = Path(path)
        if path.suffix == ".txt":
            return cls.from_text(path.read_text())
        data = path.read_bytes()
        return cls(data, 8 * len(data))

    def write(self, path, fmt: str | None = None) -> None:
        path = Path(path)
        fmt = fmt or ("txt" if path.suffix == ".txt" else "bin")
        if fmt == "txt":
            path.write_bytes((self.bits + ord("0")).astype(np.uint8).tobytes())
        elif fmt == "bin":
            path.write_bytes(self._packed.tobytes())
        else:
            raise ValueError(f"unknown stream format {fmt!r}")

    @property
    def length_bits(self) -> int:
        return self._length

    def __len__(self) -> int:
        return self._length

    @property
    def packed(self) -> bytes:
        return self._packed.tobytes()

    @property
    def bits(self) -> np.ndarray:
        """Unpacked uint8 array of 0/1 values (read-only view)."""
        if self._bits is None:
            b = np.unpackbits(self._packed, count=self._length, bitorder="little")
            b.setflags(write=False)
            self._bits = b
        return self._bits

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BitStream.from_bits(self.bits[item])
        return int(self.bits[item])

    def __eq__(self, other):
        return isinstance(other, BitStream) and self._length == other._length \
            and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        head = "".join(map(str, self.bits[:16]))
        return f"BitStream({self._length} bits, {head}{'...' if self._length > 16 else ''})"

    def to_int(self, n: int | None = None) -> int:
        """First ``n`` bits as an integer, first bit most significant."""
        n = self._length if n is None else n
        v = 0
        for b in self.bits[:n]:
            v = (v << 1) | int(b)
        return v

    @staticmethod
    def concat(streams) -> "BitStream":
        return BitStream.from_bits(np.concatenate([s.bits for s in streams]))


def as_bits(stream) -> np.ndarray:
    """0/1 uint8 array from a BitStream or any bit sequence."""
    if isinstance(stream, BitStream):
        return stream.bits
    arr = np.asarray(stream)
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    return arr.astype(np.uint8, copy=False)
