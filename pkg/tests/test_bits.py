import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvqcsim.bits import (
    Bits,
    flip_bit,
    fresh,
    from_bytes,
    lowest_set_bit,
    make_bits,
    parse_token,
)


@st.composite
def bitstrings(draw, max_width=64):
    width = draw(st.integers(min_value=0, max_value=max_width))
    value = draw(st.integers(min_value=0, max_value=(1 << width) - 1))
    return Bits(value, width)


class TestConstruction:
    def test_make_bits_rejects_overflow(self):
        with pytest.raises(ValueError):
            make_bits(4, 2)
        with pytest.raises(ValueError):
            make_bits(-1, 8)
        with pytest.raises(ValueError):
            make_bits(1, 0)

    def test_zero_width(self):
        b = make_bits(0, 0)
        assert b.token() == "0:"
        assert parse_token("0:") == b

    def test_from_bytes_round_trip(self):
        b = from_bytes(b"\x01\xff")
        assert b == Bits(0x01FF, 16)
        assert b.to_bytes() == b"\x01\xff"


class TestOps:
    def test_concat_left_high(self):
        # 101 || 01 = 10101
        assert Bits(0b101, 3).concat(Bits(0b01, 2)) == Bits(0b10101, 5)

    def test_prefix_suffix(self):
        b = Bits(0b10101, 5)
        assert b.prefix(3) == Bits(0b101, 3)
        assert b.suffix(2) == Bits(0b01, 2)
        assert b.prefix(0).width == 0

    def test_parity(self):
        assert Bits(0b1101, 4).parity_with(Bits(0b1011, 4)) == 0
        assert Bits(0b1101, 4).parity_with(Bits(0b1010, 4)) == 1

    def test_xor_width_mismatch_asserts(self):
        with pytest.raises(AssertionError):
            Bits(1, 2).xor(Bits(1, 3))

    def test_lowest_set_bit_and_flip(self):
        b = Bits(0b0110, 4)
        assert lowest_set_bit(b) == 1
        assert flip_bit(b, 1) == Bits(0b0100, 4)
        assert flip_bit(b, 3) == Bits(0b1110, 4)

    @settings(max_examples=60)
    @given(bitstrings(), bitstrings())
    def test_concat_then_split_recovers(self, a, b):
        c = a.concat(b)
        assert c.width == a.width + b.width
        assert c.prefix(a.width) == a
        assert c.suffix(b.width) == b

    @settings(max_examples=60)
    @given(bitstrings())
    def test_token_round_trip(self, b):
        assert parse_token(b.token()) == b


def test_fresh_is_deterministic_and_in_range():
    a = fresh(random.Random(7), 16)
    b = fresh(random.Random(7), 16)
    assert a == b and a.width == 16 and 0 <= a.value < 1 << 16
    assert fresh(random.Random(7), 0) == Bits(0, 0)
