"""Mock trapdoor claw-free function pair (hidden-shift instantiation).

The protocol needs a 2-to-1 function family f(b, x) with a trapdoor: the
client can invert images, the server cannot pair up the two preimages of an
image ("claw") by itself.  Here that is modeled, not assumed: pick a secret
nonzero shift s and an injective map G, and let

    f(b, x) = G(x XOR b*s),        claws are exactly (x, x XOR s).

G(u) = P(u || 0^kappa) with P a 4-round Feistel permutation on 2*kappa bits
whose round functions are seeded PRFs, so G is injective and a random-looking
2*kappa-bit image tells you nothing structural.  The trapdoor inverts P and
strips b*s; a string outside G's image (random y: all but a 2^-kappa
fraction) decodes to the invalid marker.

This instantiation is functionally exact (2-to-1, trapdoor round-trip, the
check predicate is the decode biconditional) but NOT computationally
claw-free — the public key carries the shift because public evaluation needs
it.  Claw-freeness is enforced by interface discipline instead: server-side
strategy code never receives key material, only honest post-measurement
branch data.  An LWE-backed scheme could replace this behind the same four
operations.
"""

from __future__ import annotations

from random import Random
from typing import NamedTuple

from .bits import Bits
from .oracle import _stream_bits

_ROUNDS = 4


class NtcfPublicKey(NamedTuple):
    kappa: int
    perm_seed: bytes
    shift: Bits  # functionally public in this mock; see module docstring


class NtcfSecretKey(NamedTuple):
    kappa: int
    perm_seed: bytes
    shift: Bits


class NtcfKeyMaterial(NamedTuple):
    pk: NtcfPublicKey
    sk: NtcfSecretKey
    kappa: int


class ClawResult(NamedTuple):
    y: Bits
    x0: Bits
    x1: Bits


def _round_fn(seed: bytes, rnd: int, half: int, kappa: int) -> int:
    # independent PRF per round: tag the round index above the input half
    return _stream_bits(seed, Bits((rnd << kappa) | half, kappa + 8), kappa)


def _permute(seed: bytes, u: Bits, kappa: int) -> Bits:
    assert u.width == 2 * kappa
    left, right = u.value >> kappa, u.value & ((1 << kappa) - 1)
    for rnd in range(_ROUNDS):
        left, right = right, left ^ _round_fn(seed, rnd, right, kappa)
    return Bits((left << kappa) | right, 2 * kappa)


def _unpermute(seed: bytes, y: Bits, kappa: int) -> Bits:
    assert y.width == 2 * kappa
    left, right = y.value >> kappa, y.value & ((1 << kappa) - 1)
    for rnd in reversed(range(_ROUNDS)):
        left, right = right ^ _round_fn(seed, rnd, left, kappa), left
    return Bits((left << kappa) | right, 2 * kappa)


def keygen(kappa: int, rng: Random) -> NtcfKeyMaterial:
    """Sample a permutation seed and a nonzero hidden shift."""
    if kappa < 2:
        raise ValueError("kappa must be >= 2 (shift space degenerate below that)")
    perm_seed = rng.randbytes(32)
    shift = Bits(rng.randrange(1, 1 << kappa), kappa)
    pk = NtcfPublicKey(kappa, perm_seed, shift)
    sk = NtcfSecretKey(kappa, perm_seed, shift)
    return NtcfKeyMaterial(pk, sk, kappa)


def eval_claw(pk: NtcfPublicKey, rng: Random) -> ClawResult:
    """Honest post-measurement result of evaluating f on a uniform superposition.

    Measuring the image register of sum_x |b, x, f(b,x)> yields a uniform
    image y together with the two-preimage register (|x0> + |x1>)/sqrt(2);
    classically that is y plus the claw pair, which the caller turns into a
    two-branch gadget.
    """
    u = Bits(rng.getrandbits(pk.kappa), pk.kappa)
    y = _permute(pk.perm_seed, u.concat(Bits(0, pk.kappa)), pk.kappa)
    return ClawResult(y=y, x0=u, x1=u.xor(pk.shift))


def dec(sk: NtcfSecretKey, b: int, y: Bits) -> Bits | None:
    """Trapdoor decode of branch b's preimage; None marks an invalid image."""
    if y.width != 2 * sk.kappa:
        return None
    u = _unpermute(sk.perm_seed, y, sk.kappa)
    if u.suffix(sk.kappa).value != 0:
        return None
    x = u.prefix(sk.kappa)
    return x.xor(sk.shift) if b else x


def chk(pk: NtcfPublicKey, b: int, x: Bits, y: Bits) -> bool:
    """Public check predicate: true exactly when dec(sk, b, y) = x."""
    if x.width != pk.kappa or y.width != 2 * pk.kappa:
        return False
    u = x.xor(pk.shift) if b else x
    return _permute(pk.perm_seed, u.concat(Bits(0, pk.kappa)), pk.kappa) == y


class HiddenShiftNtcf:
    """Default scheme object; protocol code goes through this indirection so a
    different instantiation can be swapped in without touching callers."""

    keygen = staticmethod(keygen)
    eval_claw = staticmethod(eval_claw)
    dec = staticmethod(dec)
    chk = staticmethod(chk)
