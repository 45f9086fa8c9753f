"""Seeded random-oracle model with lazy per-entry sampling and blinded views.

The hash H in the protocol is an ideal random function; here it is a keyed
PRF (blake2b keyed by a 32-byte seed, expanded counter-mode into an output
stream) so that every run is reproducible from the seed.  Two properties the
rest of the stack relies on:

* determinism — query(x, n) is a pure function of (seed, x, n);
* prefix consistency — query(x, n) is the first n bits of query(x, m) for
  n <= m, i.e. each entry is one long lazily-evaluated random string.

Output length is capped at |input|^2 bits: a fixed polynomial cut-off that
keeps the map total without giving callers unbounded stretch.

A *blinded view* (``blind``) models the server's side of the argument where
designated entries look freshly random: queries whose input matches a
(padLen, key) pattern — first padLen bits arbitrary, then exactly `key` —
are answered from an independent resample seed; everything else passes
through to the base oracle verbatim.  Views never mutate the base.

One oracle instance per protocol session; sessions are independent
experiments, so nothing is shared across them.
"""

from __future__ import annotations

from hashlib import blake2b
from random import Random

from .bits import Bits

_BLOCK_BYTES = 64  # blake2b max digest; one block per counter tick


def _stream_bits(seed: bytes, inp: Bits, out_len: int) -> int:
    """First out_len bits of the entry's infinite stream, as an int."""
    prefix = inp.width.to_bytes(4, "big") + inp.to_bytes()
    chunks = []
    have = 0
    ctr = 0
    while have < out_len:
        chunks.append(blake2b(prefix + ctr.to_bytes(4, "big"), key=seed, digest_size=_BLOCK_BYTES).digest())
        have += 8 * _BLOCK_BYTES
        ctr += 1
    raw = b"".join(chunks)
    return int.from_bytes(raw, "big") >> (8 * len(raw) - out_len)


def _as_bits(inp: Bits | bytes) -> Bits:
    if isinstance(inp, Bits):
        return inp
    return Bits(int.from_bytes(inp, "big"), 8 * len(inp))


class RandomOracle:
    """Lazy random map {0,1}* -> {0,1}^outLen, seeded, memoized."""

    __slots__ = ("seed", "cache")

    def __init__(self, seed: bytes):
        if len(seed) != 32:
            raise ValueError("oracle seed must be 32 bytes")
        self.seed = seed
        self.cache: dict[tuple[int, int, int], Bits] = {}

    def query(self, inp: Bits | bytes, out_len: int) -> Bits:
        inp = _as_bits(inp)
        if not 1 <= out_len <= inp.width * inp.width:
            raise ValueError(f"outLen {out_len} outside [1, |input|^2] for |input|={inp.width}")
        key = (inp.value, inp.width, out_len)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = Bits(_stream_bits(self.seed, inp, out_len), out_len)
        return hit


class OracleView:
    """Blinded view: pattern-matching queries resampled, rest forwarded."""

    __slots__ = ("base", "patterns", "resample_seed", "cache")

    def __init__(self, base: RandomOracle, patterns: list[tuple[int, Bits]], resample_seed: bytes):
        for pad_len, key in patterns:
            if pad_len < 0:
                raise ValueError("negative pad length in blind pattern")
            if key.width == 0:
                raise ValueError("empty key in blind pattern")
        self.base = base
        self.patterns = list(patterns)
        self.resample_seed = resample_seed
        self.cache: dict[tuple[int, int, int], Bits] = {}

    def _blinded(self, inp: Bits) -> bool:
        for pad_len, key in self.patterns:
            end = pad_len + key.width
            if inp.width >= end and inp.prefix(end).suffix(key.width) == key:
                return True
        return False

    def query(self, inp: Bits | bytes, out_len: int) -> Bits:
        inp = _as_bits(inp)
        if not 1 <= out_len <= inp.width * inp.width:
            raise ValueError(f"outLen {out_len} outside [1, |input|^2] for |input|={inp.width}")
        if not self._blinded(inp):
            return self.base.query(inp, out_len)
        key = (inp.value, inp.width, out_len)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = Bits(_stream_bits(self.resample_seed, inp, out_len), out_len)
        return hit


def query(oracle: RandomOracle | OracleView, inp: Bits | bytes, out_len: int) -> Bits:
    return oracle.query(inp, out_len)


def blind(oracle: RandomOracle, patterns: list[tuple[int, Bits]], resample_seed: bytes | None = None) -> OracleView:
    """View of `oracle` with the given (padLen, key) prefix patterns resampled.

    resample_seed defaults to a value derived from the base seed, so the view
    is as deterministic as the base; pass one explicitly to control it.
    """
    if resample_seed is None:
        resample_seed = blake2b(b"resample", key=oracle.seed, digest_size=32).digest()
    return OracleView(oracle, patterns, resample_seed)


def fresh_pad(rng: Random, kappa: int) -> Bits:
    """Uniform kappa-bit pad from the session RNG (client side of Hadamard tests)."""
    return Bits(rng.getrandbits(kappa) if kappa else 0, kappa)


def derive_seed(master: bytes, label: str, index: int = 0) -> bytes:
    """Independent 32-byte subseed: counter-mode blake2b keyed by the master seed."""
    return blake2b(label.encode() + index.to_bytes(8, "big"), key=master, digest_size=32).digest()
