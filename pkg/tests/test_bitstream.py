import numpy as np
import pytest
from hypothesis import given, strategies as st

from dhtrng.circuit.bitstream import BitStream, as_bits


def test_lsb_first_packing():
    s = BitStream.from_bits([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
    assert s.packed == bytes([0x01, 0x02])
    assert len(s) == 10


@given(st.lists(st.integers(0, 1), max_size=200))
def test_roundtrip_and_size(bits):
    s = BitStream.from_bits(np.array(bits, dtype=np.uint8))
    assert s.bits.tolist() == bits
    n = len(bits)
    assert n <= 8 * len(s.packed) < n + 8


def test_file_formats(tmp_path):
    s = BitStream.from_text("1101" * 10)
    s.write(tmp_path / "a.bin")
    s.write(tmp_path / "a.txt")
    assert (tmp_path / "a.txt").read_text() == "1101" * 10
    assert BitStream.read(tmp_path / "a.txt") == s
    assert BitStream.read(tmp_path / "a.bin") == s
    with pytest.raises(ValueError):
        s.write(tmp_path / "a.x", fmt="hex")


def test_rejections():
    with pytest.raises(ValueError):
        BitStream(b"\x00\x00", 3)
    with pytest.raises(ValueError):
        BitStream.from_bits([0, 2])
    with pytest.raises(ValueError):
        BitStream.from_text("0101x")


def test_to_int_msb_first():
    assert BitStream.from_text("10000000000000000000000000000001").to_int() == 0x80000001
    assert BitStream.from_text("1100").to_int(2) == 3


def test_helpers():
    a = BitStream.from_text("01")
    assert BitStream.concat([a, a]).bits.tolist() == [0, 1, 0, 1]
    assert a[1:].bits.tolist() == [1] and a[1] == 1
    assert as_bits(np.array([True, False])).tolist() == [1, 0]
