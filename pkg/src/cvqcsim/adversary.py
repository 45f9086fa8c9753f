"""Server strategies: honest behavior and tampering hooks.

The protocol layer acts as the client and calls into a per-session
``ServerSession`` object for every server action: building states at setup,
applying phase tables, dephasing on reveals, and answering the three kinds of
measurement requests.  The base class is the honest server; attacks subclass
it and override the narrow hook they tamper with.  Two rules are enforced by
interface shape, mirroring the protocol's information model:

* sessions never receive client secrets or NTCF trapdoors — setup hands the
  server only its own honest post-measurement data (the claw);
* all server randomness comes from the session's server stream, so a strategy
  cannot shift the client's draws (round type, deltas, pads, subsets).

Built-in strategies:

* ``honest`` — the reference server.
* ``conjugate`` — complex-conjugates every diagonal operation (negated table
  phases, negated dephasing) and X-corrects its decoded output.  Every
  client-observable distribution is identical to honest, bit-for-bit under a
  shared seed.
* ``phase_offset(f, g)`` — rotates branch b by f/g(theta_b) instead of
  theta_b after decrypting a phase table, then continues honestly.  Linear
  equal offsets are undetectable; nonlinear choices lose win rate and leak
  fail events (see ``expected_inph_rates``).
* ``random_response`` / ``always_lose`` — uniform-random bitstrings at every
  measurement hook (negative control; keeps honest internal state so widths
  are right).
* ``corrupt_setup`` — flips a bit of one setup image y (fault injection).
* ``ghz_collapse`` — replaces the output gadgets by a single two-branch
  register over the concatenated keys at the start of a branch-number test.
  It passes the combines deterministically, but a standard-basis measurement
  of any complement gadget collapses the register, after which the Hadamard
  coin is a fair-coin fail.
"""

from __future__ import annotations

from random import Random
from typing import Callable

from .bits import Bits
from .gadget import (
    COS2_TABLE,
    Gadget,
    KeyPair,
    PlusStateVector,
    conjugate,
    decode_output,
    decrypt_branch_phases,
    dephase,
    hadamard_sample,
    make_gadget,
    rotate_branches,
    std_sample,
)
from .ntcf import ClawResult
from .oracle import OracleView, RandomOracle
from .tables import LookupTable, decrypt_row

HELPER = -1  # gadget index of the helper block; output gadgets are 1..L, test gadget is 0

OPT = COS2_TABLE[1] / 3  # (1/3) cos^2(pi/8): the optimal quiz win rate


class ServerSession:
    """Honest server for one session; subclass hooks to tamper."""

    def __init__(self, oracle: RandomOracle | OracleView, rng: Random, kappa: int):
        self.oracle = oracle
        self.rng = rng
        self.kappa = kappa
        self.gadgets: dict[int, Gadget] = {}

    # -- setup ------------------------------------------------------------
    def setup_block(self, idx: int, claw: ClawResult) -> Bits:
        self.gadgets[idx] = make_gadget(KeyPair(claw.x0, claw.x1))
        return claw.y

    # -- phase injection ----------------------------------------------------
    def receive_phase_table(self, idx: int, table: LookupTable) -> None:
        helper_in_hand = self.gadgets[HELPER].keys.x0  # either branch decrypts alike
        g = self.gadgets[idx]
        t0, t1 = decrypt_branch_phases(g, table, helper_in_hand, self.oracle)
        t0, t1 = self.tweak_phases(idx, t0, t1)
        self.gadgets[idx] = rotate_branches(g, t0, t1)

    def tweak_phases(self, idx: int, t0: int, t1: int) -> tuple[int, int]:
        return t0, t1

    # -- reveals ------------------------------------------------------------
    def dephase_reveal(self, idx: int, revealed: int) -> None:
        self.gadgets[idx] = dephase(self.gadgets[idx], self.tweak_reveal(idx, revealed))

    def tweak_reveal(self, idx: int, revealed: int) -> int:
        return revealed

    # -- measurements ---------------------------------------------------------
    def respond_std(self, indices: list[int]) -> list[Bits]:
        out = []
        for idx in indices:
            g = self.gadgets.pop(idx)
            out.append(std_sample(g, self.rng)[1])
        return out

    def respond_combine(self, base: int, other: int, table: LookupTable) -> Bits:
        from .gadget import combine_step

        g_a = self.gadgets[base]
        g_b = self.gadgets.pop(other)
        r, combined = combine_step(g_a, g_b, table, self.oracle, self.rng)
        self.gadgets[base] = combined
        return r

    def respond_hadamard(self, idx: int, pad: Bits) -> Bits:
        g = self.gadgets.pop(idx)
        return hadamard_sample(g, pad, self.oracle, self.rng)

    # -- output -----------------------------------------------------------
    def decode_outputs(
        self, indices: list[int], revealed: list[KeyPair]
    ) -> tuple[PlusStateVector, complex] | None:
        gs = [self.gadgets.pop(i) for i in indices]
        return decode_output(gs, revealed)


class ConjugateSession(ServerSession):
    """Complex-conjugate attack: conjugated diagonal ops + X-corrected decode."""

    def tweak_phases(self, idx, t0, t1):
        return (-t0) % 8, (-t1) % 8

    def tweak_reveal(self, idx, revealed):
        return (-revealed) % 8

    def decode_outputs(self, indices, revealed):
        # the held state decodes to |+_{-theta}>; X (amplitude swap) fixes it
        for i in indices:
            g = self.gadgets[i]
            self.gadgets[i] = Gadget(g.keys, g.amp1, g.amp0)
        return super().decode_outputs(indices, revealed)


class PhaseOffsetSession(ServerSession):
    """Rotate by f(theta0)/g(theta1) instead of the decrypted phases."""

    def __init__(self, oracle, rng, kappa, f: Callable[[int], int], g: Callable[[int], int]):
        super().__init__(oracle, rng, kappa)
        self._f, self._g = f, g

    def tweak_phases(self, idx, t0, t1):
        return self._f(t0) % 8, self._g(t1) % 8


class RandomResponseSession(ServerSession):
    """Uniform-random bitstrings at every measurement hook (negative control).

    State bookkeeping stays honest so response widths are well-defined and
    later hooks still find their gadgets.
    """

    def respond_std(self, indices):
        out = []
        for idx in indices:
            g = self.gadgets.pop(idx)
            out.append(Bits(self.rng.getrandbits(g.keys.x0.width), g.keys.x0.width))
        return out

    def respond_combine(self, base, other, table):
        super().respond_combine(base, other, table)
        return Bits(self.rng.getrandbits(self.kappa), self.kappa)

    def respond_hadamard(self, idx, pad):
        g = self.gadgets.pop(idx)
        width = g.keys.x0.width + self.kappa
        return Bits(self.rng.getrandbits(width), width)

    def decode_outputs(self, indices, revealed):
        return None


class CorruptSetupSession(ServerSession):
    """Fault injection: flips the low bit of the first setup image."""

    _done = False

    def setup_block(self, idx, claw):
        y = super().setup_block(idx, claw)
        if not self._done:
            self._done = True
            y = Bits(y.value ^ 1, y.width)
        return y


class GhzSession(ServerSession):
    """Branch-number attack: merge all output gadgets into one two-branch
    register (|x0..x0> + e^{i phi}|x1..x1>)/sqrt2 when the branch-number test
    starts revealing phases.

    Combines decrypt deterministically (branches stay aligned), the
    complement standard-basis measurement collapses everything to one branch,
    and a post-collapse Hadamard request can only be answered uniformly —
    failing the parity check half the time.  Honest in every other round.
    """

    def __init__(self, oracle, rng, kappa):
        super().__init__(oracle, rng, kappa)
        self.merged: dict[int, int] | None = None  # gadget idx -> slot
        self.joint: Gadget | None = None
        self.collapsed: int | None = None
        self.folded: list[int] = []

    def _merge(self) -> None:
        idxs = sorted(i for i in self.gadgets if i >= 1)
        slots = {}
        k0 = k1 = Bits(0, 0)
        a0, a1 = complex(1, 0), complex(1, 0)
        norm = 1.0
        for slot, i in enumerate(idxs):
            g = self.gadgets.pop(i)
            slots[i] = slot
            k0, k1 = k0.concat(g.keys.x0), k1.concat(g.keys.x1)
            a0, a1 = a0 * g.amp0, a1 * g.amp1
        scale = (abs(a0) ** 2 + abs(a1) ** 2) ** -0.5
        self.joint = Gadget(KeyPair(k0, k1), a0 * scale, a1 * scale)
        self.merged = slots

    def _slice(self, b: int, idx: int) -> Bits:
        key = self.joint.keys[b]
        hi = key.width - self.merged[idx] * self.kappa
        return Bits((key.value >> (hi - self.kappa)) & ((1 << self.kappa) - 1), self.kappa)

    def dephase_reveal(self, idx, revealed):
        if idx >= 1:
            if self.joint is None:
                self._merge()
            self.joint = dephase(self.joint, revealed)
        else:
            super().dephase_reveal(idx, revealed)

    def _collapse(self) -> int:
        if self.collapsed is None:
            a0 = self.joint.amp0
            p0 = (a0.real**2 + a0.imag**2) / self.joint.norm_sq
            self.collapsed = 0 if self.rng.random() < p0 else 1
        return self.collapsed

    def respond_std(self, indices):
        if self.joint is None:
            return super().respond_std(indices)
        out = []
        for idx in indices:
            if idx in self.merged:
                b = self._collapse()
                if self.folded and idx == self.folded[0]:
                    key = Bits(0, 0)
                    for j in self.folded:
                        key = key.concat(self._slice(b, j))
                    out.append(key)
                else:
                    out.append(self._slice(b, idx))
            else:
                g = self.gadgets.pop(idx)
                out.append(std_sample(g, self.rng)[1])
        return out

    def respond_combine(self, base, other, table):
        if self.joint is None or base not in (self.merged or {}):
            return super().respond_combine(base, other, table)
        if not self.folded:
            self.folded = [base]
        key = self._slice(0, self.folded[0]).concat(self._slice(0, other))
        hit = decrypt_row(table, key, self.oracle, self.kappa)
        self.folded.append(other)
        return hit[1] if hit else Bits(0, self.kappa)

    def respond_hadamard(self, idx, pad):
        if self.joint is None or idx not in (self.merged or {}):
            return super().respond_hadamard(idx, pad)
        width = (len(self.folded) or 1) * self.kappa + self.kappa
        if self.collapsed is not None:
            # single branch left: Hadamard outcome is uniform
            return Bits(self.rng.getrandbits(width), width)
        order = self.folded or [idx]
        k0 = k1 = Bits(0, 0)
        for j in order:
            k0, k1 = k0.concat(self._slice(0, j)), k1.concat(self._slice(1, j))
        g = Gadget(KeyPair(k0, k1), self.joint.amp0, self.joint.amp1)
        return hadamard_sample(g, pad, self.oracle, self.rng)


class Strategy:
    """Stateless factory: one fresh ServerSession per protocol session."""

    def __init__(self, name: str, session_cls: type[ServerSession], spec: dict | None = None, args: tuple = ()):
        self.name = name
        self._cls = session_cls
        self._args = args
        self.spec = spec if spec is not None else {"attack": name}

    def begin(self, oracle, rng: Random, kappa: int) -> ServerSession:
        return self._cls(oracle, rng, kappa, *self._args)

    def __repr__(self):
        return f"Strategy({self.name})"


def honest() -> Strategy:
    return Strategy("honest", ServerSession)


def conjugate_attack() -> Strategy:
    return Strategy("conjugate", ConjugateSession)


def phase_offset_attack(
    f: Callable[[int], int], g: Callable[[int], int], spec: dict | None = None
) -> Strategy:
    return Strategy("phase_offset", PhaseOffsetSession, spec=spec, args=(f, g))


def random_response() -> Strategy:
    return Strategy("random_response", RandomResponseSession)


def always_lose() -> Strategy:
    return Strategy("always_lose", RandomResponseSession)


def corrupt_setup() -> Strategy:
    return Strategy("corrupt_setup", CorruptSetupSession)


def ghz_collapse() -> Strategy:
    return Strategy("ghz_collapse", GhzSession)


# -- strategy selection by name + JSON blob (CLI / parallel workers) --------

def parse_phase_fn(spec: str) -> Callable[[int], int]:
    """Phase-function grammar: identity | negate | shift:k | bump:t | const:c
    | map:v0,...,v7 (all arithmetic mod 8)."""
    if spec == "identity":
        return lambda t: t
    if spec == "negate":
        return lambda t: (-t) % 8
    head, _, arg = spec.partition(":")
    if head == "shift":
        k = int(arg)
        return lambda t: (t + k) % 8
    if head == "bump":
        tgt = int(arg) % 8
        return lambda t: (t + (1 if t % 8 == tgt else 0)) % 8
    if head == "const":
        c = int(arg) % 8
        return lambda t: c
    if head == "map":
        table = tuple(int(v) % 8 for v in arg.split(","))
        if len(table) != 8:
            raise ValueError("map needs exactly 8 values")
        return lambda t: table[t % 8]
    raise ValueError(f"unknown phase function {spec!r}")


def parse_strategy(spec: dict | str) -> Strategy:
    """Build a Strategy from a CLI-style blob, e.g.
    {"attack": "phase_offset", "f": "shift:1", "g": "identity"}."""
    if isinstance(spec, str):
        spec = {"attack": spec}
    name = spec.get("attack", "honest")
    simple = {
        "honest": honest,
        "conjugate": conjugate_attack,
        "random_response": random_response,
        "always_lose": always_lose,
        "corrupt_setup": corrupt_setup,
        "ghz_collapse": ghz_collapse,
    }
    if name in simple:
        return simple[name]()
    if name == "phase_offset":
        f_spec = spec.get("f", "identity")
        g_spec = spec.get("g", "identity")
        return phase_offset_attack(
            parse_phase_fn(f_spec),
            parse_phase_fn(g_spec),
            spec={"attack": "phase_offset", "f": f_spec, "g": g_spec},
        )
    raise ValueError(f"unknown strategy {name!r}")


# -- analytic expectation oracle ---------------------------------------------

def expected_inph_rates(f: Callable[[int], int], g: Callable[[int], int]) -> dict[str, float]:
    """Exact in-phase-test rates for a phase-offset server, averaged over the
    protocol's uniform theta, in the large-kappa limit (d-suffix failures
    ignored).

    Phase injection always produces branch phases (0, theta), which the
    attack turns into (f(0), g(theta)).  The client reveals theta - delta,
    so the residual relative phase is g(theta) - f(0) - theta + delta and
    the parity-0 probability is cos^2(residual * pi/8).
    """
    # count residuals as integers first so uniform-attack cases come out
    # exact in floating point (8 equal terms collapse to one product)
    counts = [0] * 8
    for theta in range(8):
        counts[(g(theta) - f(0) - theta) % 8] += 1
    win1 = sum(n * COS2_TABLE[(r + 1) % 8] for r, n in enumerate(counts) if n) / 8
    fail0 = sum(n * (1 - COS2_TABLE[r]) for r, n in enumerate(counts) if n) / 8
    fail4 = sum(n * COS2_TABLE[(r + 4) % 8] for r, n in enumerate(counts) if n) / 8
    return {
        "quiz_win": win1 / 3,  # delta=1 happens 1/3 of quiz rounds; parity 0 wins
        "delta0_fail": fail0,  # delta=0 passes on parity 0
        "delta4_fail": fail4,  # delta=4 passes on parity 1
        "delta_fail": (fail0 + fail4) / 2,
        "delta1_win": win1,
    }
