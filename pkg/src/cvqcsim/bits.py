"""Fixed-width bitstrings.

Everything the protocol exchanges (keys, pads, tags, measurement outcomes) is
a bitstring of known width, so we carry (value, width) pairs around as a
NamedTuple.  Convention: the *leftmost* bit of the string is the most
significant bit of ``value`` — concatenation shifts the left operand up, a
"prefix" is taken from the high end, a "suffix" from the low end.  Widths are
in bits and may be zero (the empty string is a legal prefix).

Tokens — the wire/JSON form — look like ``"12:0af"``: width in bits, colon,
the value in lowercase hex padded to ceil(width/4) nibbles.
"""

from __future__ import annotations

import random
from typing import NamedTuple


class Bits(NamedTuple):
    value: int
    width: int

    def __str__(self) -> str:
        return self.token()

    def token(self) -> str:
        nibbles = (self.width + 3) // 4
        return f"{self.width}:{self.value:0{nibbles}x}" if nibbles else f"{self.width}:"

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.width + 7) // 8, "big")

    def concat(self, other: Bits) -> Bits:
        return Bits((self.value << other.width) | other.value, self.width + other.width)

    def xor(self, other: Bits) -> Bits:
        assert self.width == other.width, "xor of unequal widths"
        return Bits(self.value ^ other.value, self.width)

    def parity_with(self, other: Bits) -> int:
        """Inner product mod 2, <self, other>."""
        assert self.width == other.width, "dot of unequal widths"
        return (self.value & other.value).bit_count() & 1

    def prefix(self, n: int) -> Bits:
        assert 0 <= n <= self.width
        return Bits(self.value >> (self.width - n), n)

    def suffix(self, n: int) -> Bits:
        assert 0 <= n <= self.width
        return Bits(self.value & ((1 << n) - 1), n)

    @property
    def is_zero(self) -> bool:
        return self.value == 0


def make_bits(value: int, width: int) -> Bits:
    """Validating constructor; the hot path builds Bits(...) directly."""
    if width < 0:
        raise ValueError(f"negative width {width}")
    if value < 0 or value >> width:
        raise ValueError(f"value {value} out of range for width {width}")
    return Bits(value, width)


def from_bytes(data: bytes) -> Bits:
    return Bits(int.from_bytes(data, "big"), 8 * len(data))


def fresh(rng: random.Random, width: int) -> Bits:
    """Uniform bitstring from the given stream (width 0 allowed)."""
    return Bits(rng.getrandbits(width) if width else 0, width)


def parse_token(token: str) -> Bits:
    width_s, _, hex_s = token.partition(":")
    width = int(width_s)
    value = int(hex_s, 16) if hex_s else 0
    return make_bits(value, width)


def lowest_set_bit(b: Bits) -> int:
    """Position (from the right, 0-based) of the lowest set bit; b must be nonzero."""
    assert b.value != 0
    return (b.value & -b.value).bit_length() - 1


def flip_bit(b: Bits, pos_from_right: int) -> Bits:
    assert 0 <= pos_from_right < b.width
    return Bits(b.value ^ (1 << pos_from_right), b.width)
