"""Exact state engine for two-branch gadgets with Z8 phases.

A gadget is the server-side state (1/sqrt2)(e^{i theta0 pi/4}|x0> +
e^{i theta1 pi/4}|x1>): two branch keys and two complex amplitudes.  Honest
execution and every built-in attack stay inside this family, which is what
makes thousand-gadget sessions linear-time — there is no general statevector
here, just (keys, amp0, amp1) updated exactly.

Measurement sampling is exact, not approximate:

* standard basis — branch b with probability |amp_b|^2;
* padded Hadamard basis — measuring amp0|w0> + amp1|w1> (w_b = x_b ||
  H(pad||x_b)) in the Hadamard basis gives outcome d with probability
  |amp0 (-1)^{d.w0} + amp1 (-1)^{d.w1}|^2 / 2^n, which factorizes into a
  two-point parity distribution (the class c = d.(w0 xor w1)) times a
  uniform choice within the class.  ``hadamard_sample`` implements the
  factorized law; ``enumerate_hadamard_distribution`` is the brute-force
  statevector enumeration kept as an independent oracle for tests and
  selftest.

All 8th-root phase factors come from the ROOT8 table below, built from a
single sqrt(0.5) literal, so conjugating a gadget (amp.conjugate()) yields
*numerically identical* probabilities for every observable — runs that
differ only by conjugation make bit-identical random decisions from the
same RNG stream.  That exactness is load-bearing for the conjugate-attack
equivalence tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from random import Random
from typing import NamedTuple

from .bits import Bits, flip_bit, lowest_set_bit
from .oracle import OracleView, RandomOracle, query
from .tables import LookupTable, decrypt_row

Oracle = RandomOracle | OracleView

_SQ = math.sqrt(0.5)
INV_SQRT2 = _SQ

# e^{i k pi/4} for k = 0..7, from one sqrt(0.5) literal: ROOT8[(8-k) % 8] is
# the exact complex conjugate of ROOT8[k], component by component.
ROOT8 = (
    complex(1, 0),
    complex(_SQ, _SQ),
    complex(0, 1),
    complex(-_SQ, _SQ),
    complex(-1, 0),
    complex(-_SQ, -_SQ),
    complex(0, -1),
    complex(_SQ, -_SQ),
)

# |<+_a|+_b>|^2 as a function of (a - b) mod 8; exact 0.0 at orthogonality
# and symmetric under delta <-> 8 - delta by construction.
_C8 = math.cos(math.pi / 8) ** 2
_S8 = math.sin(math.pi / 8) ** 2
COS2_TABLE = (1.0, _C8, 0.5, _S8, 0.0, _S8, 0.5, _C8)

# Probabilities this close to the simplex boundary are boundary values in
# exact arithmetic (the branch family cannot produce genuinely tiny nonzero
# parity weights above float error); snapping keeps one-sided tests one-sided.
_SNAP = 1e-24


class TableMismatch(Exception):
    """A lookup table did not decrypt consistently under the expected keys."""


class KeyPair(NamedTuple):
    x0: Bits
    x1: Bits


class PhasePair(NamedTuple):
    theta0: int
    theta1: int


@dataclass(frozen=True, slots=True)
class Gadget:
    keys: KeyPair
    amp0: complex
    amp1: complex

    @property
    def norm_sq(self) -> float:
        a0, a1 = self.amp0, self.amp1
        return a0.real * a0.real + a0.imag * a0.imag + a1.real * a1.real + a1.imag * a1.imag


@dataclass(frozen=True, slots=True)
class PlusStateVector:
    thetas: tuple[int, ...]


def make_gadget(keys: KeyPair, phases: PhasePair | None = None) -> Gadget:
    assert keys[0] != keys[1], "branch keys must be distinct"
    if phases is None:
        return Gadget(KeyPair(*keys), INV_SQRT2 + 0j, INV_SQRT2 + 0j)
    return Gadget(
        KeyPair(*keys),
        ROOT8[phases[0] % 8] * INV_SQRT2,
        ROOT8[phases[1] % 8] * INV_SQRT2,
    )


def _table_kappa(table: LookupTable) -> int:
    return table.rows[0].tag.width


def decrypt_branch_phases(
    g: Gadget, table: LookupTable, helper_key_in_hand: Bits, oracle: Oracle
) -> tuple[int, int]:
    """What the server learns per branch from a phase table: (theta0, theta1)."""
    kappa = _table_kappa(table)
    out = []
    for x_b in g.keys:
        hit = decrypt_row(table, helper_key_in_hand.concat(x_b), oracle, kappa)
        if hit is None:
            raise TableMismatch("phase table has no row for a branch key")
        out.append(hit[1])
    return out[0], out[1]


def rotate_branches(g: Gadget, theta0: int, theta1: int) -> Gadget:
    """Diagonal phase op: amp_b *= e^{i theta_b pi/4}."""
    return Gadget(g.keys, g.amp0 * ROOT8[theta0 % 8], g.amp1 * ROOT8[theta1 % 8])


def apply_phase_table(g: Gadget, table: LookupTable, helper_key_in_hand: Bits, oracle: Oracle) -> Gadget:
    """Decrypt the branch phases under helper-branch||own-branch and rotate.

    The honest server does this in superposition and then uncomputes the
    phase register by decrypting again, so the net effect is exactly a
    per-branch phase rotation — no entanglement residue to track.
    """
    t0, t1 = decrypt_branch_phases(g, table, helper_key_in_hand, oracle)
    return rotate_branches(g, t0, t1)


def dephase(g: Gadget, revealed: int) -> Gadget:
    """Rotate branch 1 by e^{-i revealed pi/4} (the server's reaction to a
    revealed relative phase; residual relative phase = old - revealed)."""
    return Gadget(g.keys, g.amp0, g.amp1 * ROOT8[(8 - revealed % 8) % 8])


def conjugate(g: Gadget) -> Gadget:
    return Gadget(g.keys, g.amp0.conjugate(), g.amp1.conjugate())


def std_sample(g: Gadget, rng: Random) -> tuple[int, Bits]:
    """Standard-basis measurement: (b, x_b) with Pr[b] = |amp_b|^2."""
    a0 = g.amp0
    p0 = (a0.real * a0.real + a0.imag * a0.imag) / g.norm_sq
    b = 0 if rng.random() < p0 else 1
    return b, g.keys[b]


def branch_words(g: Gadget, pad: Bits, oracle: Oracle, kappa: int) -> tuple[Bits, Bits]:
    """w_b = x_b || H(pad || x_b, kappa) — the padded-Hadamard words."""
    w0 = g.keys.x0.concat(query(oracle, pad.concat(g.keys.x0), kappa))
    w1 = g.keys.x1.concat(query(oracle, pad.concat(g.keys.x1), kappa))
    return w0, w1


def parity_probs(g: Gadget) -> tuple[float, float]:
    """(Pr[c=0], Pr[c=1]) for the Hadamard parity class c = d.(w0 xor w1)."""
    s = g.amp0 + g.amp1
    d = g.amp0 - g.amp1
    p0 = s.real * s.real + s.imag * s.imag
    p1 = d.real * d.real + d.imag * d.imag
    tot = p0 + p1
    p1 /= tot
    if p1 < _SNAP:
        p1 = 0.0
    elif p1 > 1.0 - _SNAP:
        p1 = 1.0
    return 1.0 - p1, p1


def enumerate_hadamard_distribution(g: Gadget, pad: Bits, oracle: Oracle, kappa: int) -> dict[int, float]:
    """Brute-force oracle: full 2^(|x|+kappa) Hadamard-basis distribution.

    Expands amp0|w0> + amp1|w1> over every outcome d; exponential, for tests
    and selftest only.
    """
    w0, w1 = branch_words(g, pad, oracle, kappa)
    n = w0.width
    norm = g.norm_sq
    out: dict[int, float] = {}
    for d in range(1 << n):
        s0 = -1.0 if (d & w0.value).bit_count() & 1 else 1.0
        s1 = -1.0 if (d & w1.value).bit_count() & 1 else 1.0
        amp = g.amp0 * s0 + g.amp1 * s1
        out[d] = (amp.real * amp.real + amp.imag * amp.imag) / (norm * (1 << n))
    return out


def sampler_distribution(g: Gadget, pad: Bits, oracle: Oracle, kappa: int) -> dict[int, float]:
    """The exact law implemented by ``hadamard_sample`` (class weight times
    uniform-in-class), for direct comparison against the enumeration oracle."""
    w0, w1 = branch_words(g, pad, oracle, kappa)
    delta = w0.xor(w1)
    assert not delta.is_zero
    p = parity_probs(g)
    n = w0.width
    half = 1 << (n - 1)
    return {d: p[(d & delta.value).bit_count() & 1] / half for d in range(1 << n)}


def hadamard_sample(g: Gadget, pad: Bits, oracle: Oracle, rng: Random) -> Bits:
    """Padded Hadamard-basis measurement outcome d (gadget consumed).

    Exact two-step draw: parity class c with the two-point law, then a
    uniform element of {d : d.(w0 xor w1) = c} — a uniform draw with the
    pivot bit (lowest set bit of the xor) flipped on parity mismatch.
    """
    w0, w1 = branch_words(g, pad, oracle, pad.width)
    delta = w0.xor(w1)
    assert not delta.is_zero, "branch words collide (impossible for distinct keys)"
    c = 1 if rng.random() < parity_probs(g)[1] else 0
    d = Bits(rng.getrandbits(delta.width), delta.width)
    if d.parity_with(delta) != c:
        d = flip_bit(d, lowest_set_bit(delta))
    return d


def combine_step(
    g_a: Gadget, g_b: Gadget, table: LookupTable, oracle: Oracle, rng: Random
) -> tuple[Bits, Gadget]:
    """Merge two gadgets through a combine table.

    The server decrypts the table in superposition and measures the result
    register: outcome r0 keeps equal-subscript branch pairs (x0a x0b / x1a
    x1b), outcome r1 the crossed pairs; amplitudes multiply and renormalize.
    Table rows are keyed by the *first kappa bits* of the a-side branch (the
    client builds them from the base gadget's keys).
    """
    kappa = _table_kappa(table)
    r = {}
    for a in (0, 1):
        for b in (0, 1):
            hit = decrypt_row(table, g_a.keys[a].prefix(kappa).concat(g_b.keys[b]), oracle, kappa)
            if hit is None:
                raise TableMismatch("combine table has no row for a branch pair")
            r[a, b] = hit[1]
    if r[0, 0] != r[1, 1] or r[0, 1] != r[1, 0] or r[0, 0] == r[0, 1]:
        raise TableMismatch("table decryptions do not form a combine pattern")

    pair_eq = (g_a.amp0 * g_b.amp0, g_a.amp1 * g_b.amp1)
    pair_cr = (g_a.amp0 * g_b.amp1, g_a.amp1 * g_b.amp0)
    w_eq = abs(pair_eq[0]) ** 2 + abs(pair_eq[1]) ** 2
    w_cr = abs(pair_cr[0]) ** 2 + abs(pair_cr[1]) ** 2
    take_eq = rng.random() < w_eq / (w_eq + w_cr)
    amps, weight = (pair_eq, w_eq) if take_eq else (pair_cr, w_cr)
    scale = 1.0 / math.sqrt(weight)
    keys = (
        KeyPair(g_a.keys.x0.concat(g_b.keys.x0), g_a.keys.x1.concat(g_b.keys.x1))
        if take_eq
        else KeyPair(g_a.keys.x0.concat(g_b.keys.x1), g_a.keys.x1.concat(g_b.keys.x0))
    )
    combined = Gadget(keys, amps[0] * scale, amps[1] * scale)
    return (r[0, 0] if take_eq else r[0, 1]), combined


def decode_output(
    gadgets: list[Gadget], revealed_keys: list[KeyPair], tol: float = 1e-9
) -> tuple[PlusStateVector, complex]:
    """Honest decode: recover each theta = theta1 - theta0 from the amplitude
    ratio, yielding the product state |+_theta(1)> x ... plus a global phase.

    Gadget branch order must match the revealed key pairs (an X-corrected
    server swaps its branches first); a ratio off the 8th roots of unity by
    more than `tol` means the state left honest form.
    """
    if len(gadgets) != len(revealed_keys):
        raise ValueError("gadget/key count mismatch")
    thetas = []
    global_phase = complex(1, 0)
    for g, keys in zip(gadgets, revealed_keys):
        if g.keys != tuple(keys):
            raise TableMismatch("gadget keys do not match revealed pair")
        ratio = g.amp1 / g.amp0
        for k in range(8):
            if abs(ratio - ROOT8[k]) <= tol:
                thetas.append(k)
                break
        else:
            raise TableMismatch(f"amplitude ratio {ratio!r} is not an 8th root of unity")
        global_phase *= g.amp0 / abs(g.amp0)
    return PlusStateVector(tuple(thetas)), global_phase


def fidelity_ideal(decoded: PlusStateVector, client_thetas: list[int] | tuple[int, ...]) -> float:
    """prod_i |<+_client(i) | +_decoded(i)>|^2 = prod_i cos^2(delta_i pi/8)."""
    if len(decoded.thetas) != len(client_thetas):
        raise ValueError("length mismatch")
    f = 1.0
    for a, b in zip(decoded.thetas, client_thetas):
        f *= COS2_TABLE[(a - b) % 8]
    return f
